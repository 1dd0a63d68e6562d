import numpy as np
import pytest

import scriptkit as sk


def test_hangul_round_trip():
    assert sk.decompose("한") == (18, 0, 4)
    assert sk.compose(18, 0, 4) == "한"
    assert sk.decompose("a") is None
    with pytest.raises(sk.InvalidBlockError):
        sk.compose(19, 0, 0)


def test_tokenize_daehanminguk():
    seq = sk.tokenize("대한민국")
    assert len(seq) == 12
    assert seq.roles == "IVF" * 4
    assert seq.symbols[:3] == "ㄷㅐ▃"
    assert sk.detokenize(sk.tokenize("Hello 한글", "bts")) == "Hello 한글"
    assert sk.slot_width("bts") == 13
    with pytest.raises(sk.ConfigError):
        sk.tokenize("가", "morse")


def test_subword_encode():
    vocab = sk.SubwordVocab.train(["대한 민국"], 100, "wordlist")
    ids, spans = vocab.encode("대한민국")
    assert spans == [(0, 2), (2, 4)]
    assert [vocab.token(i) for i in ids] == ["대한", "민국"]


def test_oracle():
    assert sk.oracle_align("했다", ["하", "았", "다"]) == [("했", ["B-MOD-하", "I-MOD-았"]), ("다", ["B-KEEP"])]
    assert sk.classify_mod("하", ["한"]) == "subcharacter"
    assert sk.classify_mod("이", ["라"]) == "character"
    stats = sk.oracle_stats([("했다", ["하", "았", "다"])])
    assert stats["mod"] == 1 and stats["keep"] == 1


def test_model_forward_train_and_checkpoint(tmp_path):
    vocab = sk.SubwordVocab.train(["먹다 먹었다 가다 갔다 보다 봤다"], 100, "charlist")
    config = {"embed_dim": 8, "residual_fusion": True, "cls_bypass": True}
    model = sk.ScriptModel(config, vocab, seed=3)
    out = model.forward("먹었다")
    assert isinstance(out, np.ndarray)
    assert out.shape == (4, 8)

    pairs = [("먹다", "먹었다", "past"), ("가다", "갔다", "past"), ("보다", "봤다", "past")]
    log = sk.train(model, pairs, {"epochs": 3, "batch_size": 2, "seed": 5})
    assert [row["epoch"] for row in log] == [1, 2, 3]

    path = tmp_path / "m.ckpt"
    model.save(path, seed=5)
    again = sk.ScriptModel.load(path)
    np.testing.assert_array_equal(again.forward("먹었다"), model.forward("먹었다"))
    sim = sk.pair_similarity(again, pairs)
    assert len(sim["fused"]) == 3


def test_gradcheck_and_probes():
    vocab = sk.SubwordVocab.train(["하다"], 7, "charlist")
    model = sk.ScriptModel({"embed_dim": 4}, vocab, seed=1)
    report = sk.gradcheck(model, "하다")
    assert report["passed"], report
    assert sk.cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
    result = sk.pca([[0.0, 0.0], [1.0, 2.0], [2.0, 4.0]], k=1)
    assert len(result["components"][0]) == 2
    assert sk.cohesion([[1.0, 0.0], [1.0, 0.0]])["dispersion"] == pytest.approx(0.0)
