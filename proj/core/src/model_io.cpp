#include "d2dra/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "d2dra/errors.hpp"
#include "d2dra/version.hpp"

namespace d2dra {

namespace {

using nlohmann::json;
using nn::Mat;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw IoError("model file: malformed matrix");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(r);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw IoError("model file: ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

json params_to_json(const nn::ParamSet& params) {
  json out = json::array();
  for (const auto& e : params.entries) {
    out.push_back(json{{"name", e.name},
                       {"rows", e.value.rows()},
                       {"cols", e.value.cols()},
                       {"data", matrix_to_json(e.value)}});
  }
  return out;
}

nn::ParamSet params_from_json(const json& j) {
  nn::ParamSet params;
  for (const json& e : j) {
    nn::ParamSet::Entry entry;
    entry.name = e.at("name").get<std::string>();
    entry.value = matrix_from_json(e.at("data"));
    if (entry.value.rows() != e.at("rows").get<Eigen::Index>() ||
        entry.value.cols() != e.at("cols").get<Eigen::Index>()) {
      throw IoError("model file: matrix shape disagrees with its declared shape");
    }
    params.entries.push_back(std::move(entry));
  }
  return params;
}

void check_stack_dims(const nn::ParamSet& params, const std::vector<int>& dims,
                      const std::string& which) {
  if (params.entries.size() != 2 * (dims.size() - 1)) {
    throw IoError("model file: " + which + " layer count disagrees with arch");
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Mat& w = params.entries[2 * l].value;
    const Mat& b = params.entries[2 * l + 1].value;
    if (w.rows() != dims[l] || w.cols() != dims[l + 1] || b.rows() != 1 ||
        b.cols() != dims[l + 1]) {
      throw IoError("model file: " + which + " weight shapes disagree with arch");
    }
  }
}

}  // namespace

void save_model(const RaModel& model, const std::string& path) {
  json doc{
      {"magic", "d2dra-model"},
      {"format_version", kModelFormatVersion},
      {"arch",
       {{"layers_tnet", model.arch.layers_tnet},
        {"layers_pnet", model.arch.layers_pnet},
        {"hidden_width", model.arch.hidden_width},
        {"input_dim", model.arch.input_dim}}},
      {"goal", to_string(model.goal)},
      {"system",
       {{"n_due", model.system.n_due},
        {"n_channels", model.system.n_channels},
        {"area_d", model.system.area_d},
        {"p_max_dbm", model.system.p_max_dbm},
        {"p_circuit_dbm", model.system.p_circuit_dbm},
        {"bandwidth_hz", model.system.bandwidth_hz},
        {"noise_density_dbm_hz", model.system.noise_density_dbm_hz},
        {"i_thresh_dbm", model.system.i_thresh_dbm},
        {"r_thresh", model.system.r_thresh},
        {"p_cue_dbm", model.system.p_cue_dbm},
        {"pair_dist_min_m", model.system.pair_dist_min_m},
        {"pair_dist_max_m", model.system.pair_dist_max_m},
        {"pathloss_coeff_log10", model.system.pathloss_coeff_log10},
        {"pathloss_exp", model.system.pathloss_exp}}},
      {"norm", {{"mean", model.norm.mean}, {"stddev", model.norm.stddev}}},
      {"meta",
       {{"dataset_seed", model.meta.dataset_seed},
        {"train_seed", model.meta.train_seed},
        {"epochs", model.meta.epochs},
        {"adam_steps", model.meta.adam_steps},
        {"final_train_loss", model.meta.final_train_loss},
        {"final_val_loss", model.meta.final_val_loss}}},
      {"tnet", params_to_json(model.tnet)},
      {"pnet", params_to_json(model.pnet)},
  };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(1) << '\n';
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

RaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("bad model file " + path + ": " + e.what());
  }
  if (doc.value("magic", "") != "d2dra-model") throw IoError("not a model file: " + path);
  if (doc.at("format_version").get<int>() != kModelFormatVersion) {
    throw IoError("unsupported model format version in " + path);
  }

  RaModel model;
  try {
    const json& a = doc.at("arch");
    model.arch.layers_tnet = a.at("layers_tnet").get<int>();
    model.arch.layers_pnet = a.at("layers_pnet").get<int>();
    model.arch.hidden_width = a.at("hidden_width").get<int>();
    model.arch.input_dim = a.at("input_dim").get<int>();

    const json& s = doc.at("system");
    model.system.n_due = s.at("n_due").get<int>();
    model.system.n_channels = s.at("n_channels").get<int>();
    model.system.area_d = s.at("area_d").get<double>();
    model.system.p_max_dbm = s.at("p_max_dbm").get<double>();
    model.system.p_circuit_dbm = s.at("p_circuit_dbm").get<double>();
    model.system.bandwidth_hz = s.at("bandwidth_hz").get<double>();
    model.system.noise_density_dbm_hz = s.at("noise_density_dbm_hz").get<double>();
    model.system.i_thresh_dbm = s.at("i_thresh_dbm").get<double>();
    model.system.r_thresh = s.at("r_thresh").get<double>();
    model.system.p_cue_dbm = s.at("p_cue_dbm").get<double>();
    model.system.pair_dist_min_m = s.at("pair_dist_min_m").get<double>();
    model.system.pair_dist_max_m = s.at("pair_dist_max_m").get<double>();
    model.system.pathloss_coeff_log10 = s.at("pathloss_coeff_log10").get<double>();
    model.system.pathloss_exp = s.at("pathloss_exp").get<double>();

    model.goal = parse_goal(doc.at("goal").get<std::string>());
    model.norm.mean = doc.at("norm").at("mean").get<std::vector<double>>();
    model.norm.stddev = doc.at("norm").at("stddev").get<std::vector<double>>();

    const json& meta = doc.at("meta");
    model.meta.dataset_seed = meta.at("dataset_seed").get<std::uint64_t>();
    model.meta.train_seed = meta.at("train_seed").get<std::uint64_t>();
    model.meta.epochs = meta.at("epochs").get<int>();
    model.meta.adam_steps = meta.at("adam_steps").get<std::int64_t>();
    model.meta.final_train_loss = meta.at("final_train_loss").get<double>();
    model.meta.final_val_loss = meta.at("final_val_loss").get<double>();

    model.tnet = params_from_json(doc.at("tnet"));
    model.pnet = params_from_json(doc.at("pnet"));
  } catch (const json::exception& e) {
    throw IoError("bad model fields in " + path + ": " + e.what());
  }

  model.system.validate();
  try {
    model.arch.validate(model.system);
  } catch (const ConfigError& e) {
    throw IoError(std::string("model file arch/system mismatch: ") + e.what());
  }
  check_stack_dims(model.tnet, model.arch.tnet_dims(model.system), "tnet");
  check_stack_dims(model.pnet, model.arch.pnet_dims(model.system), "pnet");
  if (model.norm.mean.size() != static_cast<std::size_t>(model.arch.input_dim) ||
      model.norm.stddev.size() != model.norm.mean.size()) {
    throw IoError("model file: normalization stats length disagrees with input_dim");
  }
  return model;
}

}  // namespace d2dra
