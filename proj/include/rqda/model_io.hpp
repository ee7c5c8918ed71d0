#ifndef RQDA_MODEL_IO_HPP
#define RQDA_MODEL_IO_HPP

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqda/ensemble.hpp"
#include "rqda/error.hpp"

namespace rqda {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using Json = nlohmann::ordered_json;

// Matrices are stored row-major: {"rows": r, "cols": c, "data": [...]}.
inline Json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(m(i, j));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw FormatError("matrix shape does not match its data length");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
    }
  }
  return m;
}

} // namespace detail

/// Serializes a fitted ensemble to the versioned JSON model format. Floats are
/// written in shortest round-trip form, so save/load is exact.
inline std::string model_to_json(const EnsembleModel& model) {
  using detail::Json;
  const auto& c = model.config;
  Json config{{"d", c.d},
              {"b1", c.b1},
              {"b2", c.b2},
              {"projection", std::string(to_string(c.flavor))},
              {"ridge", c.ridge ? Json(*c.ridge) : Json(nullptr)},
              {"alpha_policy", c.alpha ? "fixed" : "auto"},
              {"alpha", model.alpha},
              {"seed", c.seed}};
  Json blocks = Json::array();
  for (const auto& b : model.blocks) {
    blocks.push_back(Json{{"candidate", b.candidate},
                          {"training_error", b.training_error},
                          {"projection", Json{{"seed", b.projection.seed}, {"matrix", detail::matrix_to_json(b.projection.matrix)}}},
                          {"pi0", b.model.pi0},
                          {"pi1", b.model.pi1},
                          {"ridge", b.model.ridge},
                          {"class_count", b.model.class_count},
                          {"sigma0", detail::matrix_to_json(b.model.sigma[0].matrix())},
                          {"sigma1", detail::matrix_to_json(b.model.sigma[1].matrix())}});
  }
  Json doc{{"format", "rqda-ensemble"},
           {"version", kModelFormatVersion},
           {"config", std::move(config)},
           {"p", model.marginals.features()},
           {"n", model.marginals.samples()},
           {"marginals", model.marginals.sorted_columns()},
           {"blocks", std::move(blocks)}};
  return doc.dump(1) + "\n";
}

inline EnsembleModel model_from_json(const std::string& text) {
  using detail::Json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "rqda-ensemble") {
      throw FormatError("not an rqda-ensemble model file");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    EnsembleModel model;
    const auto& c = doc.at("config");
    model.config.d = c.at("d").get<Eigen::Index>();
    model.config.b1 = c.at("b1").get<std::size_t>();
    model.config.b2 = c.at("b2").get<std::size_t>();
    const auto flavor = parse_flavor(c.at("projection").get<std::string>());
    if (!flavor) {
      throw FormatError("unknown projection flavor in model file");
    }
    model.config.flavor = *flavor;
    if (!c.at("ridge").is_null()) {
      model.config.ridge = c.at("ridge").get<double>();
    }
    model.alpha = c.at("alpha").get<double>();
    if (c.at("alpha_policy").get<std::string>() == "fixed") {
      model.config.alpha = model.alpha;
    }
    model.config.seed = c.at("seed").get<std::uint64_t>();
    if (!(model.alpha >= 0.0 && model.alpha <= 1.0)) {
      throw FormatError("alpha outside [0, 1]");
    }

    model.marginals = MarginalModel(doc.at("marginals").get<std::vector<std::vector<double>>>());
    const auto p = static_cast<Eigen::Index>(model.marginals.features());
    if (doc.at("p").get<std::size_t>() != model.marginals.features() ||
        doc.at("n").get<std::size_t>() != model.marginals.samples()) {
      throw FormatError("marginal tables do not match the recorded p and n");
    }

    for (const auto& jb : doc.at("blocks")) {
      EnsembleBlock b;
      b.candidate = jb.at("candidate").get<std::size_t>();
      b.training_error = jb.at("training_error").get<double>();
      b.projection.flavor = model.config.flavor;
      b.projection.seed = jb.at("projection").at("seed").get<std::uint64_t>();
      b.projection.matrix = detail::matrix_from_json(jb.at("projection").at("matrix"));
      if (b.projection.rows() != model.config.d || b.projection.cols() != p) {
        throw FormatError("projection matrix shape does not match d x p");
      }
      b.model = make_rqda_model({jb.at("pi0").get<double>(), jb.at("pi1").get<double>()},
                                SpdMatrix(detail::matrix_from_json(jb.at("sigma0"))),
                                SpdMatrix(detail::matrix_from_json(jb.at("sigma1"))),
                                jb.at("ridge").get<std::array<double, 2>>(),
                                jb.at("class_count").get<std::array<std::size_t, 2>>());
      if (b.model.dim() != model.config.d) {
        throw FormatError("covariance shape does not match d");
      }
      model.blocks.push_back(std::move(b));
    }
    if (model.blocks.size() != model.config.b1) {
      throw FormatError("model file has " + std::to_string(model.blocks.size()) + " blocks, config says " +
                        std::to_string(model.config.b1));
    }
    return model;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const ContractError& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const EnsembleModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << model_to_json(model);
  if (!out) {
    throw DataError("failed writing '" + path + "'");
  }
}

inline EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open model '" + path + "'");
  }
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return model_from_json(text);
}

} // namespace rqda

#endif // RQDA_MODEL_IO_HPP
