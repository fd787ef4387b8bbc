#include "gridbench/scenario/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "gridbench/error.hpp"

namespace gridbench::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void append_number(std::string& out, long long v) {
  char buf[24];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// rows x cols numeric table with a header row.
template <typename Value>
void write_table(const fs::path& path, const std::vector<std::string>& header, std::size_t rows,
                 const std::function<Value(std::size_t, std::size_t)>& cell) {
  std::string text;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) text += ',';
    text += header[j];
  }
  text += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) text += ',';
      append_number(text, cell(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path, std::size_t expected_cols) {
  const std::string text = read_text(path);
  Table t;
  std::size_t pos = 0, line_no = 0;
  const std::string name = path.filename().string();
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (t.header.empty()) {
      std::size_t s = 0;
      while (true) {
        const std::size_t c = line.find(',', s);
        t.header.emplace_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
        if (c == std::string_view::npos) break;
        s = c + 1;
      }
      if (t.header.size() != expected_cols) {
        throw ParseError("expected " + std::to_string(expected_cols) + " columns, found " +
                             std::to_string(t.header.size()),
                         line_no, name);
      }
      continue;
    }
    std::vector<double> row;
    row.reserve(expected_cols);
    const char* p = line.data();
    const char* stop = line.data() + line.size();
    while (p <= stop) {
      double v = 0.0;
      const auto r = std::from_chars(p, stop, v);
      if (r.ec != std::errc()) throw ParseError("invalid number", line_no, name);
      row.push_back(v);
      p = r.ptr;
      if (p == stop) break;
      if (*p != ',') throw ParseError("expected ','", line_no, name);
      ++p;
    }
    if (row.size() != expected_cols) {
      throw ParseError("expected " + std::to_string(expected_cols) + " values, found " + std::to_string(row.size()),
                       line_no, name);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError("missing header", 1, name);
  return t;
}

std::vector<std::string> ids_header(const char* prefix, std::size_t n, const std::function<int(std::size_t)>& id) {
  std::vector<std::string> h;
  h.reserve(n);
  for (std::size_t i = 0; i < n; ++i) h.push_back(prefix + std::to_string(id(i)));
  return h;
}

std::vector<std::string> line_header(const grid::GridCase& c) {
  return ids_header("line_", c.line_count(), [&](std::size_t i) { return c.lines()[i].id; });
}

std::vector<std::string> element_header(const grid::GridCase& c) {
  std::vector<std::string> h;
  for (const auto& e : c.elements()) {
    static const char* kinds[] = {"load_", "gen_", "line_or_", "line_ex_"};
    int id = 0;
    switch (e.kind) {
      case grid::ElementKind::Load: id = c.loads()[static_cast<std::size_t>(e.index)].id; break;
      case grid::ElementKind::Generator: id = c.generators()[static_cast<std::size_t>(e.index)].id; break;
      default: id = c.lines()[static_cast<std::size_t>(e.index)].id; break;
    }
    h.push_back(kinds[static_cast<int>(e.kind)] + std::to_string(id));
  }
  return h;
}

std::vector<double>& quantity(powerflow::LineFlows& f, const std::string& name) {
  if (name == "a_or") return f.a_or;
  if (name == "a_ex") return f.a_ex;
  if (name == "p_or") return f.p_or;
  if (name == "p_ex") return f.p_ex;
  if (name == "q_or") return f.q_or;
  if (name == "q_ex") return f.q_ex;
  if (name == "v_or") return f.v_or;
  if (name == "v_ex") return f.v_ex;
  if (name == "theta_or") return f.theta_or;
  if (name == "theta_ex") return f.theta_ex;
  throw ValidationError("unknown line quantity " + name);
}

const std::vector<double>& quantity(const powerflow::LineFlows& f, const std::string& name) {
  return quantity(const_cast<powerflow::LineFlows&>(f), name);
}

void write_line_quantities(const fs::path& dir, const grid::GridCase& c,
                           const std::vector<const powerflow::LineFlows*>& flows) {
  const auto header = line_header(c);
  for (const auto& q : kLineQuantities) {
    bool present = true;
    for (const auto* f : flows) present = present && quantity(*f, q).size() == c.line_count();
    if (!present) continue;
    write_table<double>(dir / (q + ".csv"), header, flows.size(),
                        [&](std::size_t i, std::size_t j) { return quantity(*flows[i], q)[j]; });
  }
}

// Fills `flows` (already sized) from whichever quantity files exist.
void read_line_quantities(const fs::path& dir, const grid::GridCase& c, std::vector<powerflow::LineFlows>& flows,
                          const std::vector<std::string>& required) {
  const std::size_t L = c.line_count();
  for (const auto& q : kLineQuantities) {
    const fs::path path = dir / (q + ".csv");
    const bool needed = std::find(required.begin(), required.end(), q) != required.end();
    if (!fs::exists(path)) {
      if (needed) throw IoError("missing " + path.string());
      continue;
    }
    Table t = read_table(path, L);
    if (!flows.empty() && t.rows.size() != flows.size()) {
      throw ValidationError(path.string() + ": " + std::to_string(t.rows.size()) + " rows, expected " +
                            std::to_string(flows.size()));
    }
    if (flows.empty()) flows.resize(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) quantity(flows[i], q) = std::move(t.rows[i]);
  }
}

}  // namespace

void write_dataset(const fs::path& dir, const grid::GridCase& c, const Dataset& ds) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::size_t n = ds.size();
  const auto& s = ds.samples;

  const auto gen_header = ids_header("gen_", c.generators().size(), [&](std::size_t i) { return c.generators()[i].id; });
  const auto load_header = ids_header("load_", c.loads().size(), [&](std::size_t i) { return c.loads()[i].id; });
  write_table<double>(dir / "prod_p.csv", gen_header, n, [&](auto i, auto j) { return s[i].injections.prod_p[j]; });
  write_table<double>(dir / "prod_v.csv", gen_header, n, [&](auto i, auto j) { return s[i].injections.prod_v[j]; });
  write_table<double>(dir / "load_p.csv", load_header, n, [&](auto i, auto j) { return s[i].injections.load_p[j]; });
  write_table<double>(dir / "load_q.csv", load_header, n, [&](auto i, auto j) { return s[i].injections.load_q[j]; });
  write_table<long long>(dir / "line_status.csv", line_header(c), n,
                         [&](auto i, auto j) { return static_cast<long long>(s[i].topology.line_status[j]); });
  write_table<long long>(dir / "topo_vect.csv", element_header(c), n,
                         [&](auto i, auto j) { return static_cast<long long>(s[i].topology.busbar[j]); });

  std::vector<const powerflow::LineFlows*> flows;
  for (const auto& x : s) flows.push_back(&x.flows);
  write_line_quantities(dir, c, flows);

  std::string sc = "sample,reference_actions,disconnected_lines\n";
  for (std::size_t i = 0; i < n; ++i) {
    append_number(sc, static_cast<long long>(i));
    sc += ',';
    for (std::size_t k = 0; k < s[i].reference_actions.size(); ++k) {
      if (k) sc += ' ';
      append_number(sc, static_cast<long long>(s[i].reference_actions[k]));
    }
    sc += ',';
    for (std::size_t k = 0; k < s[i].disconnected_lines.size(); ++k) {
      if (k) sc += ' ';
      append_number(sc, static_cast<long long>(c.lines()[static_cast<std::size_t>(s[i].disconnected_lines[k])].id));
    }
    sc += '\n';
  }
  write_text(dir / "scenarios.csv", sc);

  bool physics = n > 0;
  for (const auto& x : s) physics = physics && x.physics.has_value();
  if (physics) {
    std::string yb = "sample,row,col,re,im\n", sb = "sample,node,substation,busbar,re,im,type\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = *s[i].physics;
      for (const auto& e : p.ybus) {
        for (long long v : {static_cast<long long>(i), static_cast<long long>(e.row), static_cast<long long>(e.col)}) {
          append_number(yb, v);
          yb += ',';
        }
        append_number(yb, e.value.real());
        yb += ',';
        append_number(yb, e.value.imag());
        yb += '\n';
      }
      for (std::size_t k = 0; k < p.sbus.size(); ++k) {
        const auto [sub, bb] = p.nodes[k];
        for (long long v : {static_cast<long long>(i), static_cast<long long>(k),
                            static_cast<long long>(c.substations()[static_cast<std::size_t>(sub)].id),
                            static_cast<long long>(bb)}) {
          append_number(sb, v);
          sb += ',';
        }
        append_number(sb, p.sbus[k].real());
        sb += ',';
        append_number(sb, p.sbus[k].imag());
        const bool pv = std::find(p.pv_nodes.begin(), p.pv_nodes.end(), static_cast<int>(k)) != p.pv_nodes.end();
        sb += static_cast<int>(k) == p.slack ? ",slack\n" : (pv ? ",pv\n" : ",pq\n");
      }
    }
    write_text(dir / "ybus.csv", yb);
    write_text(dir / "sbus.csv", sb);
  }

  json m;
  m["kind"] = "dataset";
  m["split"] = ds.split;
  m["samples"] = n;
  m["env_seed"] = ds.env_seed;
  m["actor_seed"] = ds.actor_seed;
  m["config_hash"] = ds.config_hash;
  m["case_hash"] = ds.case_hash;
  m["topology_redraws"] = ds.topology_redraws;
  m["solver_redraws"] = ds.solver_redraws;
  m["loss_redraws"] = ds.loss_redraws;
  m["physics_attributes"] = physics;
  m["tool_version"] = GRIDBENCH_VERSION;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& dir, const grid::GridCase& c) {
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, (dir / "manifest.json").string());
  }
  Dataset ds;
  try {
    ds.split = m.at("split").get<std::string>();
    ds.env_seed = m.at("env_seed").get<std::uint64_t>();
    ds.actor_seed = m.at("actor_seed").get<std::uint64_t>();
    ds.config_hash = m.value("config_hash", std::string{});
    ds.case_hash = m.value("case_hash", std::string{});
    ds.topology_redraws = m.value("topology_redraws", std::size_t{0});
    ds.solver_redraws = m.value("solver_redraws", std::size_t{0});
    ds.loss_redraws = m.value("loss_redraws", std::size_t{0});
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, (dir / "manifest.json").string());
  }
  const std::size_t G = c.generators().size(), D = c.loads().size(), L = c.line_count();
  const Table prod_p = read_table(dir / "prod_p.csv", G);
  const std::size_t n = prod_p.rows.size();
  auto expect = [&](const Table& t, const char* name) {
    if (t.rows.size() != n) {
      throw ValidationError(std::string(name) + " has " + std::to_string(t.rows.size()) + " rows, expected " +
                            std::to_string(n));
    }
  };
  const Table prod_v = read_table(dir / "prod_v.csv", G);
  const Table load_p = read_table(dir / "load_p.csv", D);
  const Table load_q = read_table(dir / "load_q.csv", D);
  const Table status = read_table(dir / "line_status.csv", L);
  const Table topo = read_table(dir / "topo_vect.csv", c.element_count());
  expect(prod_v, "prod_v.csv");
  expect(load_p, "load_p.csv");
  expect(load_q, "load_q.csv");
  expect(status, "line_status.csv");
  expect(topo, "topo_vect.csv");

  std::vector<powerflow::LineFlows> flows(n);
  read_line_quantities(dir, c, flows, kLineQuantities);

  ds.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = ds.samples[i];
    s.injections.prod_p = prod_p.rows[i];
    s.injections.prod_v = prod_v.rows[i];
    s.injections.load_p = load_p.rows[i];
    s.injections.load_q = load_q.rows[i];
    s.topology.line_status.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      s.topology.line_status[l] = status.rows[i][l] != 0.0 ? 1 : 0;
      if (!status.rows[i][l]) s.disconnected_lines.push_back(static_cast<int>(l));
    }
    s.topology.busbar.resize(c.element_count());
    for (std::size_t e = 0; e < c.element_count(); ++e) s.topology.busbar[e] = static_cast<int>(topo.rows[i][e]);
    s.flows = std::move(flows[i]);
  }

  // Reference actions are informational; read them when present.
  if (fs::exists(dir / "scenarios.csv")) {
    std::istringstream in(read_text(dir / "scenarios.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t row = 0;
    while (std::getline(in, line) && row < n) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) throw ParseError("malformed row", row + 2, "scenarios.csv");
      std::istringstream acts(line.substr(c1 + 1, c2 - c1 - 1));
      int a = 0;
      while (acts >> a) ds.samples[row].reference_actions.push_back(a);
      ++row;
    }
  }
  return ds;
}

void write_predictions(const fs::path& dir, const grid::GridCase& c, const metrics::PredictionSet& pred,
                       const std::string& manifest_json) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<const powerflow::LineFlows*> flows;
  for (const auto& f : pred.samples) {
    for (const auto& q : kRequiredPredictions) {
      if (quantity(f, q).size() != c.line_count()) throw ValidationError("prediction is missing " + q);
    }
    flows.push_back(&f);
  }
  write_line_quantities(dir, c, flows);
  write_text(dir / "manifest.json", manifest_json);
}

metrics::PredictionSet read_predictions(const fs::path& dir, const grid::GridCase& c) {
  if (!fs::is_directory(dir)) throw IoError("prediction directory " + dir.string() + " does not exist");
  metrics::PredictionSet p;
  read_line_quantities(dir, c, p.samples, kRequiredPredictions);
  return p;
}

metrics::PredictionSet as_predictions(const Dataset& ds) {
  metrics::PredictionSet p;
  p.samples.reserve(ds.size());
  for (const auto& s : ds.samples) p.samples.push_back(s.flows);
  return p;
}

}  // namespace gridbench::scenario
