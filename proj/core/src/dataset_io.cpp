#include "d2dra/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "d2dra/binary_io.hpp"
#include "d2dra/digest.hpp"
#include "d2dra/errors.hpp"
#include "d2dra/rng.hpp"
#include "d2dra/version.hpp"

namespace d2dra {

namespace {

using nlohmann::json;

json config_to_json(const SystemConfig& c) {
  return json{{"n_due", c.n_due},
              {"n_channels", c.n_channels},
              {"area_d", c.area_d},
              {"p_max_dbm", c.p_max_dbm},
              {"p_circuit_dbm", c.p_circuit_dbm},
              {"bandwidth_hz", c.bandwidth_hz},
              {"noise_density_dbm_hz", c.noise_density_dbm_hz},
              {"i_thresh_dbm", c.i_thresh_dbm},
              {"r_thresh", c.r_thresh},
              {"p_cue_dbm", c.p_cue_dbm},
              {"pair_dist_min_m", c.pair_dist_min_m},
              {"pair_dist_max_m", c.pair_dist_max_m},
              {"pathloss_coeff_log10", c.pathloss_coeff_log10},
              {"pathloss_exp", c.pathloss_exp}};
}

SystemConfig config_from_json(const json& j) {
  SystemConfig c;
  c.n_due = j.at("n_due").get<int>();
  c.n_channels = j.at("n_channels").get<int>();
  c.area_d = j.at("area_d").get<double>();
  c.p_max_dbm = j.at("p_max_dbm").get<double>();
  c.p_circuit_dbm = j.at("p_circuit_dbm").get<double>();
  c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  c.noise_density_dbm_hz = j.at("noise_density_dbm_hz").get<double>();
  c.i_thresh_dbm = j.at("i_thresh_dbm").get<double>();
  c.r_thresh = j.at("r_thresh").get<double>();
  c.p_cue_dbm = j.at("p_cue_dbm").get<double>();
  c.pair_dist_min_m = j.at("pair_dist_min_m").get<double>();
  c.pair_dist_max_m = j.at("pair_dist_max_m").get<double>();
  c.pathloss_coeff_log10 = j.at("pathloss_coeff_log10").get<double>();
  c.pathloss_exp = j.at("pathloss_exp").get<double>();
  return c;
}

void write_coords(std::ostream& out, const Topology& t) {
  for (const Vec2& p : t.due_tx) {
    write_f64(out, p.x);
    write_f64(out, p.y);
  }
  for (const Vec2& p : t.due_rx) {
    write_f64(out, p.x);
    write_f64(out, p.y);
  }
  write_f64(out, t.cue.x);
  write_f64(out, t.cue.y);
  write_f64(out, t.bs.x);
  write_f64(out, t.bs.y);
}

void write_dataset_stream(std::ostream& out, const Dataset& dataset) {
  json header{{"magic", "d2dra-dataset"},
              {"format_version", kDatasetFormatVersion},
              {"generator", RandomStream::kGeneratorId},
              {"config", config_to_json(dataset.config)},
              {"seed", dataset.seed},
              {"count", dataset.count()},
              {"record_fields",
               json::array({"gains[m][i][j] row-major f64le",
                            "coords f64le: due_tx xy, due_rx xy, cue xy, bs xy"})}};
  const std::string header_text = header.dump();

  write_u64(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const ChannelInstance& inst : dataset.instances) {
    write_f64_span(out, inst.gains);
    write_coords(out, inst.topology);
  }
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  if (dataset.instances.empty()) throw ConfigError("save_dataset: empty dataset");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_dataset_stream(out, dataset);
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

std::string dataset_digest_hex(const Dataset& dataset) {
  std::ostringstream buffer(std::ios::binary);
  write_dataset_stream(buffer, dataset);
  return sha256_hex(buffer.str());
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path);

  const std::uint64_t header_len = read_u64(in);
  if (header_len == 0 || header_len > (1u << 20)) {
    throw IoError("dataset header length implausible in " + path);
  }
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError("truncated dataset header in " + path);

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw IoError("bad dataset header in " + path + ": " + e.what());
  }
  if (header.value("magic", "") != "d2dra-dataset") {
    throw IoError("not a dataset file: " + path);
  }
  if (header.at("format_version").get<int>() != kDatasetFormatVersion) {
    throw IoError("unsupported dataset format version in " + path);
  }

  Dataset ds;
  try {
    ds.config = config_from_json(header.at("config"));
    ds.seed = header.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError("bad dataset header fields in " + path + ": " + e.what());
  }
  ds.config.validate();
  const std::uint64_t count = header.at("count").get<std::uint64_t>();
  if (count == 0) throw IoError("dataset declares zero instances: " + path);

  const int n = ds.config.n_due;
  const int s = n + 1;
  const std::size_t gains_per = static_cast<std::size_t>(ds.config.n_channels) * s * s;

  ds.instances.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    ChannelInstance& inst = ds.instances[k];
    inst.n_channels = ds.config.n_channels;
    inst.gains.resize(gains_per);
    try {
      read_f64_span(in, inst.gains);
      Topology& t = inst.topology;
      t.n_due = n;
      t.due_tx.resize(n);
      t.due_rx.resize(n);
      for (Vec2& p : t.due_tx) {
        p.x = read_f64(in);
        p.y = read_f64(in);
      }
      for (Vec2& p : t.due_rx) {
        p.x = read_f64(in);
        p.y = read_f64(in);
      }
      t.cue.x = read_f64(in);
      t.cue.y = read_f64(in);
      t.bs.x = read_f64(in);
      t.bs.y = read_f64(in);
    } catch (const IoError&) {
      throw IoError("dataset payload shape mismatch (record " + std::to_string(k) + " of " +
                    std::to_string(count) + ") in " + path);
    }
    Topology& t = inst.topology;
    t.dist.resize(static_cast<std::size_t>(s) * s);
    for (int tx = 0; tx < s; ++tx) {
      for (int rx = 0; rx < s; ++rx) {
        const Vec2 a = tx == 0 ? t.cue : t.due_tx[tx - 1];
        const Vec2 b = rx == 0 ? t.bs : t.due_rx[rx - 1];
        t.dist[tx * s + rx] = std::hypot(a.x - b.x, a.y - b.y);
      }
    }
  }
  // Trailing bytes mean the header count disagrees with the payload.
  char probe;
  in.read(&probe, 1);
  if (!in.eof()) throw IoError("dataset has trailing bytes beyond declared count: " + path);
  return ds;
}

void export_dataset_csv(const Dataset& dataset, const std::string& path) {
  if (dataset.instances.empty()) throw ConfigError("export_dataset_csv: empty dataset");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);

  const SystemConfig& c = dataset.config;
  const int s = c.n_due + 1;
  std::ostringstream head;
  for (int m = 0; m < c.n_channels; ++m) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        if (head.tellp() > 0) head << ',';
        head << "h_" << m << '_' << i << '_' << j;
      }
    }
  }
  for (int i = 0; i < c.n_due; ++i) head << ",due_tx" << i << "_x,due_tx" << i << "_y";
  for (int i = 0; i < c.n_due; ++i) head << ",due_rx" << i << "_x,due_rx" << i << "_y";
  head << ",cue_x,cue_y,bs_x,bs_y";
  out << head.str() << '\n';

  char buf[32];
  auto put = [&](double v, bool first) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!first) out << ',';
    out << buf;
  };
  for (const ChannelInstance& inst : dataset.instances) {
    bool first = true;
    for (double g : inst.gains) {
      put(g, first);
      first = false;
    }
    for (const Vec2& p : inst.topology.due_tx) {
      put(p.x, false);
      put(p.y, false);
    }
    for (const Vec2& p : inst.topology.due_rx) {
      put(p.x, false);
      put(p.y, false);
    }
    put(inst.topology.cue.x, false);
    put(inst.topology.cue.y, false);
    put(inst.topology.bs.x, false);
    put(inst.topology.bs.y, false);
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

}  // namespace d2dra
