#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scriptkit/checkpoint.hpp"
#include "scriptkit/config.hpp"
#include "scriptkit/error.hpp"
#include "scriptkit/gradcheck.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/model.hpp"
#include "scriptkit/oracle.hpp"
#include "scriptkit/probe.hpp"
#include "scriptkit/subchar.hpp"
#include "scriptkit/subword.hpp"
#include "scriptkit/trainer.hpp"

namespace py = pybind11;
namespace sk = scriptkit;

namespace {

sk::Scheme scheme_arg(const std::string& name) {
  auto s = sk::parse_scheme(name);
  if (!s) throw sk::ConfigError("unknown scheme '" + name + "'");
  return *s;
}

sk::VocabMode mode_arg(const std::string& name) {
  auto m = sk::parse_vocab_mode(name);
  if (!m) throw sk::ConfigError("unknown vocab mode '" + name + "'");
  return *m;
}

sk::ScriptConfig config_arg(const py::dict& settings) {
  sk::ScriptConfig config;
  for (const auto& [key, value] : settings) {
    const auto k = py::str(key).cast<std::string>();
    std::string v = py::isinstance<py::bool_>(value) ? (value.cast<bool>() ? "true" : "false")
                                                     : py::str(value).cast<std::string>();
    if (!config.set(k, v)) throw sk::ConfigError("unknown config key '" + k + "'");
  }
  config.validate();
  return config;
}

sk::TrainConfig train_config_arg(const py::dict& settings) {
  sk::TrainConfig config;
  for (const auto& [key, value] : settings) {
    const auto k = py::str(key).cast<std::string>();
    std::string v = py::isinstance<py::bool_>(value) ? (value.cast<bool>() ? "true" : "false")
                                                     : py::str(value).cast<std::string>();
    if (!config.set(k, v)) throw sk::ConfigError("unknown training key '" + k + "'");
  }
  config.validate();
  return config;
}

py::array_t<double> to_array(const sk::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> spans_of(const sk::BoundaryMap& map) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& r : map.ranges) out.emplace_back(r.begin, r.end);
  return out;
}

sk::BoundaryMap map_of(const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
  sk::BoundaryMap map;
  for (const auto& [b, e] : spans) map.ranges.push_back({b, e});
  return map;
}

sk::PairDataset pairs_arg(const std::vector<std::tuple<std::u32string, std::u32string, std::string>>& rows) {
  sk::PairDataset data;
  for (const auto& [a, b, rel] : rows) data.push_back({a, b, rel});
  return data;
}

py::dict cohesion_dict(const sk::Cohesion& c) {
  py::dict d;
  d["mean_cosine"] = c.mean_cosine;
  d["dispersion"] = c.dispersion;
  d["spread"] = c.spread;
  return d;
}

const sk::SubcharTokenizer& tokenizer() {
  static const sk::SubcharTokenizer t;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hangul subcharacter tokenization, morphological oracle and SCRIPT-style composition";

  auto error = py::register_exception<sk::Error>(m, "Error");
  py::register_exception<sk::ConfigError>(m, "ConfigError", error);
  py::register_exception<sk::ParseError>(m, "ParseError", error);
  py::register_exception<sk::ShapeError>(m, "ShapeError", error);
  py::register_exception<sk::InvalidBlockError>(m, "InvalidBlockError", error);
  py::register_exception<sk::MalformedSequenceError>(m, "MalformedSequenceError", error);
  py::register_exception<sk::AlignmentError>(m, "AlignmentError", error);
  py::register_exception<sk::NotApplicableError>(m, "NotApplicableError", error);
  py::register_exception<sk::IndexError>(m, "IndexError", error);

  // Hangul arithmetic.
  m.def(
      "decompose",
      [](char32_t ch) -> std::optional<std::tuple<int, int, int>> {
        auto b = sk::hangul::decompose(ch);
        if (!b) return std::nullopt;
        return std::make_tuple(b->cho, b->jung, b->jong);
      },
      py::arg("ch"), "(cho, jung, jong) indices of a precomposed syllable, or None");
  m.def(
      "compose", [](int cho, int jung, int jong) { return sk::hangul::compose({cho, jung, jong}); }, py::arg("cho"),
      py::arg("jung"), py::arg("jong") = 0);

  // Subcharacter tokenizer.
  py::class_<sk::SubcharSequence>(m, "SubcharSequence")
      .def_property_readonly("scheme", [](const sk::SubcharSequence& s) { return sk::to_string(s.scheme); })
      .def_property_readonly("width", &sk::SubcharSequence::width)
      .def_readonly("ids", &sk::SubcharSequence::ids)
      .def_property_readonly("roles",
                             [](const sk::SubcharSequence& s) {
                               std::string out;
                               for (auto r : s.roles) out.push_back(sk::role_label(r));
                               return out;
                             })
      .def_property_readonly("symbols",
                             [](const sk::SubcharSequence& s) { return std::u32string(s.symbols.begin(), s.symbols.end()); })
      .def("__len__", &sk::SubcharSequence::size);
  m.def(
      "tokenize", [](const std::u32string& text, const std::string& scheme) {
        return tokenizer().tokenize(std::u32string_view(text), scheme_arg(scheme));
      },
      py::arg("text"), py::arg("scheme") = "jamo");
  m.def(
      "detokenize", [](const sk::SubcharSequence& seq) { return tokenizer().detokenize(seq); }, py::arg("seq"));
  m.def(
      "slot_width", [](const std::string& scheme) { return sk::slot_widths(scheme_arg(scheme)).total(); },
      py::arg("scheme"));

  // Subword vocabulary.
  py::class_<sk::SubwordVocab>(m, "SubwordVocab")
      .def_static(
          "train",
          [](const std::vector<std::u32string>& corpus, std::size_t size, const std::string& mode, bool cls) {
            return sk::SubwordVocab::train(corpus, size, mode_arg(mode), cls);
          },
          py::arg("corpus"), py::arg("size"), py::arg("mode") = "bpe-lite", py::arg("cls") = false)
      .def_static("parse", [](const std::string& text) { return sk::SubwordVocab::parse(text); })
      .def_static("load", &sk::SubwordVocab::load)
      .def("to_text", &sk::SubwordVocab::to_text)
      .def("token", &sk::SubwordVocab::token)
      .def("__len__", &sk::SubwordVocab::size)
      .def(
          "encode",
          [](const sk::SubwordVocab& v, const std::u32string& text, bool cls) {
            const auto enc = sk::encode(text, v, cls);
            return std::make_pair(enc.ids, spans_of(enc.boundary));
          },
          py::arg("text"), py::arg("cls") = false, "Token ids and [begin, end) character spans");

  // Morphological oracle.
  m.def(
      "oracle_align",
      [](const std::u32string& surface, const std::vector<std::u32string>& lemma_units) {
        std::vector<std::pair<std::u32string, std::vector<std::string>>> out;
        for (const auto& ch : sk::oracle::align(surface, lemma_units)) {
          std::vector<std::string> tags;
          for (const auto& a : ch.actions) tags.push_back(a.str());
          out.emplace_back(std::u32string(1, ch.surface), tags);
        }
        return out;
      },
      py::arg("surface"), py::arg("lemma_units"));
  m.def(
      "classify_mod",
      [](char32_t surface, const std::vector<std::u32string>& targets) {
        return sk::oracle::to_string(sk::oracle::classify_mod(surface, targets));
      },
      py::arg("surface"), py::arg("targets"));
  m.def(
      "oracle_stats_json",
      [](const std::vector<std::pair<std::u32string, std::vector<std::u32string>>>& records, std::size_t top_k) {
        sk::oracle::CorpusStats stats;
        for (const auto& [surface, units] : records) {
          for (const auto& ch : sk::oracle::align(surface, units)) stats.add(ch);
        }
        return stats.to_json(top_k);
      },
      py::arg("records"), py::arg("top_k") = 10);

  // Model.
  py::class_<sk::ScriptModel>(m, "ScriptModel")
      .def(py::init([](const py::dict& config, const sk::SubwordVocab& vocab, std::uint64_t seed) {
             return sk::ScriptModel::create(config_arg(config), vocab, seed);
           }),
           py::arg("config"), py::arg("vocab"), py::arg("seed") = 13)
      .def_static("load",
                  [](const std::filesystem::path& path) {
                    return sk::ScriptModel::from_checkpoint(sk::Checkpoint::load(path));
                  })
      .def(
          "save", [](const sk::ScriptModel& model, const std::filesystem::path& path,
                     std::uint64_t seed) { model.checkpoint(seed).save(path); },
          py::arg("path"), py::arg("seed") = 0)
      .def_property_readonly("config", [](const sk::ScriptModel& model) { return model.config().to_text(); })
      .def_property_readonly("vocab", &sk::ScriptModel::vocab)
      .def(
          "forward",
          [](const sk::ScriptModel& model, const std::u32string& text,
             const std::optional<std::vector<std::pair<std::size_t, std::size_t>>>& spans) {
            if (!spans) return to_array(model.forward(std::u32string_view(text)));
            const auto map = map_of(*spans);
            return to_array(model.forward(std::u32string_view(text), nullptr, &map));
          },
          py::arg("text"), py::arg("spans") = std::nullopt, "Fused embeddings e_F as an (units, D) array")
      .def(
          "word_vector",
          [](const sk::ScriptModel& model, const std::u32string& word, bool fused) {
            return sk::word_vector(model, word, fused ? sk::Channel::Fused : sk::Channel::Raw);
          },
          py::arg("word"), py::arg("fused") = true)
      .def("zero_script_parameters", &sk::ScriptModel::zero_script_parameters)
      .def("parameter_count",
           [](const sk::ScriptModel& model) { return model.param_group().scalar_count(); });

  m.def(
      "gradcheck",
      [](sk::ScriptModel& model, const std::u32string& text, double eps, double tol) {
        const sk::LossFn loss = [&](bool with_grad) {
          sk::ForwardTrace trace;
          const sk::Tensor y = model.forward(std::u32string_view(text), &trace);
          sk::Tensor dy(y.shape());
          double total = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) {
            total += y[i] * y[i] / static_cast<double>(y.size());
            dy[i] = 2.0 * y[i] / static_cast<double>(y.size());
          }
          if (with_grad) model.backward(trace, dy);
          return total;
        };
        sk::GradCheckOptions options;
        options.eps = eps;
        options.tol = tol;
        const auto r = sk::grad_check(loss, model.param_group(), options);
        py::dict d;
        d["max_rel_error"] = r.max_rel_error;
        d["max_abs_error"] = r.max_abs_error;
        d["worst_param"] = r.worst_param;
        d["coordinates"] = r.coordinates;
        d["passed"] = r.passed;
        return d;
      },
      py::arg("model"), py::arg("text"), py::arg("eps") = 1e-6, py::arg("tol") = 1e-4,
      "Mean-square loss over e_F; analytic vs central-difference gradients");

  m.def(
      "train",
      [](sk::ScriptModel& model, const std::vector<std::tuple<std::u32string, std::u32string, std::string>>& pairs,
         const py::dict& settings) {
        const auto result = sk::train(model, pairs_arg(pairs), train_config_arg(settings));
        py::list log;
        for (const auto& e : result.log) {
          py::dict d;
          d["epoch"] = e.epoch;
          d["loss"] = e.loss;
          d["mean_pair_cos_fused"] = e.mean_pair_cos_fused;
          d["mean_pair_cos_raw"] = e.mean_pair_cos_raw;
          d["mean_random_cos"] = e.mean_random_cos;
          log.append(d);
        }
        return log;
      },
      py::arg("model"), py::arg("pairs"), py::arg("settings") = py::dict());

  // Probes.
  m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return sk::cosine(a, b); });
  m.def(
      "pair_similarity",
      [](const sk::ScriptModel& model,
         const std::vector<std::tuple<std::u32string, std::u32string, std::string>>& pairs) {
        const auto sim = sk::pair_similarity(model, pairs_arg(pairs));
        py::dict d;
        d["raw"] = sim.raw;
        d["fused"] = sim.fused;
        d["mean_raw"] = sim.mean_raw;
        d["mean_fused"] = sim.mean_fused;
        return d;
      },
      py::arg("model"), py::arg("pairs"));
  m.def(
      "pca",
      [](const std::vector<std::vector<double>>& rows, std::size_t k, std::uint64_t seed) {
        const auto r = sk::pca(rows, k, seed);
        py::dict d;
        d["components"] = r.components;
        d["eigenvalues"] = r.eigenvalues;
        d["coordinates"] = r.coordinates;
        return d;
      },
      py::arg("rows"), py::arg("k") = 2, py::arg("seed") = 1);
  m.def(
      "cohesion", [](const std::vector<std::vector<double>>& vectors) { return cohesion_dict(sk::cohesion(vectors)); },
      py::arg("vectors"));
}
