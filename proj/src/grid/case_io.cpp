#include "gridbench/grid/case_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gridbench/error.hpp"

namespace gridbench::grid {

using nlohmann::json;

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing required field", 0, path + "/" + key);
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw ParseError("expected a number", 0, path + "/" + key);
  return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, path);
}

int integer(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ParseError("expected an integer", 0, path + "/" + key);
  return v.get<int>();
}

const json& array_field(const json& obj, const char* key, bool required) {
  static const json empty = json::array();
  if (!obj.contains(key)) {
    if (required) throw ParseError("missing required field", 0, std::string("/") + key);
    return empty;
  }
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ParseError("expected an array", 0, std::string("/") + key);
  return v;
}

}  // namespace

GridCase parse_native_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "");
  }
  if (!doc.is_object()) throw ParseError("top level must be an object", 1, "");

  CaseData data;
  data.base_mva = number(doc, "base_mva", "");
  std::map<int, int> sub_index;
  const auto& subs = array_field(doc, "substations", true);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const std::string path = "/substations/" + std::to_string(i);
    Substation s;
    s.id = integer(subs[i], "id", path);
    s.name = subs[i].value("name", std::string{});
    s.base_kv = number(subs[i], "base_kv", path);
    sub_index.emplace(s.id, static_cast<int>(i));
    data.substations.push_back(std::move(s));
  }
  auto resolve = [&](const json& obj, const char* key, const std::string& path) {
    const int id = integer(obj, key, path);
    auto it = sub_index.find(id);
    if (it == sub_index.end()) {
      throw ValidationError(path + "/" + key + " references unknown substation " + std::to_string(id));
    }
    return it->second;
  };

  const auto& lines = array_field(doc, "lines", true);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string path = "/lines/" + std::to_string(i);
    Line l;
    l.id = integer(lines[i], "id", path);
    l.sub_or = resolve(lines[i], "or", path);
    l.sub_ex = resolve(lines[i], "ex", path);
    l.r = number(lines[i], "r", path);
    l.x = number(lines[i], "x", path);
    l.b = number_or(lines[i], "b", path, 0.0);
    l.tap = number_or(lines[i], "tap", path, 1.0);
    data.lines.push_back(l);
  }
  const auto& gens = array_field(doc, "generators", true);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string path = "/generators/" + std::to_string(i);
    Generator g;
    g.id = integer(gens[i], "id", path);
    g.sub = resolve(gens[i], "substation", path);
    g.p_mw = number(gens[i], "p_mw", path);
    g.v_kv = number(gens[i], "v_kv", path);
    g.slack = gens[i].value("slack", false);
    data.generators.push_back(g);
  }
  const auto& loads = array_field(doc, "loads", true);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const std::string path = "/loads/" + std::to_string(i);
    Load l;
    l.id = integer(loads[i], "id", path);
    l.sub = resolve(loads[i], "substation", path);
    l.p_mw = number(loads[i], "p_mw", path);
    l.q_mvar = number_or(loads[i], "q_mvar", path, 0.0);
    data.loads.push_back(l);
  }
  const auto& shunts = array_field(doc, "shunts", false);
  for (std::size_t i = 0; i < shunts.size(); ++i) {
    const std::string path = "/shunts/" + std::to_string(i);
    Shunt s;
    s.id = integer(shunts[i], "id", path);
    s.sub = resolve(shunts[i], "substation", path);
    s.g_mw = number_or(shunts[i], "g_mw", path, 0.0);
    s.b_mvar = number_or(shunts[i], "b_mvar", path, 0.0);
    data.shunts.push_back(s);
  }
  return GridCase::create(std::move(data));
}

namespace {

struct Matrix {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
};

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool comment = false;
  for (char c : text) {
    if (c == '%') comment = true;
    if (c == '\n') comment = false;
    out.push_back(comment ? ' ' : c);
  }
  return out;
}

Matrix read_matrix(const std::string& text, const std::string& name, bool required) {
  const std::string key = "mpc." + name;
  std::size_t pos = 0;
  while (true) {
    pos = text.find(key, pos);
    if (pos == std::string::npos) {
      if (required) throw ParseError("missing matrix", 0, key);
      return {};
    }
    std::size_t after = pos + key.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == '=') {
      pos = after;
      break;
    }
    pos = after;
  }
  const std::size_t open = text.find('[', pos);
  const std::size_t close = text.find(']', open);
  if (open == std::string::npos || close == std::string::npos) {
    throw ParseError("unterminated matrix", line_of_offset(text, pos), key);
  }
  Matrix m;
  std::vector<double> row;
  std::size_t i = open + 1;
  auto flush = [&](std::size_t at) {
    if (!row.empty()) {
      m.rows.push_back(std::move(row));
      m.row_lines.push_back(line_of_offset(text, at));
      row.clear();
    }
  };
  while (i < close) {
    const char c = text[i];
    if (c == ';' || c == '\n') {
      flush(i);
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++i;
    } else {
      std::size_t end = i;
      while (end < close && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != ';' &&
             text[end] != ',') {
        ++end;
      }
      double value = 0.0;
      const char* first = text.data() + i;
      const char* last = text.data() + end;
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last) {
        throw ParseError("invalid number '" + text.substr(i, end - i) + "'", line_of_offset(text, i), key);
      }
      row.push_back(value);
      i = end;
    }
  }
  flush(close);
  return m;
}

double read_scalar(const std::string& text, const std::string& name) {
  const std::string key = "mpc." + name;
  const std::size_t pos = text.find(key);
  if (pos == std::string::npos) throw ParseError("missing scalar", 0, key);
  const std::size_t eq = text.find('=', pos);
  const std::size_t semi = text.find_first_of(";\n", eq);
  std::istringstream in(text.substr(eq + 1, semi - eq - 1));
  double value = 0.0;
  if (!(in >> value)) throw ParseError("invalid number", line_of_offset(text, pos), key);
  return value;
}

void check_columns(const Matrix& m, std::size_t needed, const std::string& name) {
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    if (m.rows[r].size() < needed) {
      throw ParseError("expected at least " + std::to_string(needed) + " columns, found " +
                           std::to_string(m.rows[r].size()),
                       m.row_lines[r], "mpc." + name);
    }
  }
}

}  // namespace

GridCase parse_matpower_case(std::string_view raw, const ImportOptions& options) {
  const std::string text = strip_comments(raw);
  CaseData data;
  data.base_mva = read_scalar(text, "baseMVA");
  const Matrix bus = read_matrix(text, "bus", true);
  const Matrix gen = read_matrix(text, "gen", true);
  const Matrix branch = read_matrix(text, "branch", true);
  check_columns(bus, 13, "bus");
  check_columns(gen, 8, "gen");
  check_columns(branch, 11, "branch");

  std::map<int, int> sub_index;
  std::vector<int> bus_type;
  for (std::size_t r = 0; r < bus.rows.size(); ++r) {
    const auto& row = bus.rows[r];
    const int id = static_cast<int>(row[0]);
    const int type = static_cast<int>(row[1]);
    if (type == 4) throw ParseError("isolated buses (type 4) are not supported", bus.row_lines[r], "mpc.bus");
    Substation s;
    s.id = id;
    s.base_kv = row[9] > 0.0 ? row[9] : options.default_base_kv;
    if (!sub_index.emplace(id, static_cast<int>(r)).second) {
      throw ParseError("duplicate bus number " + std::to_string(id), bus.row_lines[r], "mpc.bus");
    }
    data.substations.push_back(s);
    bus_type.push_back(type);
  }
  auto resolve = [&](double bus_number, std::size_t line, const char* field) {
    auto it = sub_index.find(static_cast<int>(bus_number));
    if (it == sub_index.end()) {
      throw ParseError("unknown bus " + std::to_string(static_cast<int>(bus_number)), line, field);
    }
    return it->second;
  };

  int load_id = 0;
  int shunt_id = 0;
  for (std::size_t r = 0; r < bus.rows.size(); ++r) {
    const auto& row = bus.rows[r];
    if (row[2] != 0.0 || row[3] != 0.0) {
      data.loads.push_back({load_id++, static_cast<int>(r), row[2], row[3]});
    }
    if (row[4] != 0.0 || row[5] != 0.0) {
      data.shunts.push_back({shunt_id++, static_cast<int>(r), row[4], row[5]});
    }
  }

  int gen_id = 0;
  bool slack_assigned = false;
  for (std::size_t r = 0; r < gen.rows.size(); ++r) {
    const auto& row = gen.rows[r];
    if (row[7] <= 0.0) continue;
    const int sub = resolve(row[0], gen.row_lines[r], "mpc.gen");
    Generator g;
    g.id = gen_id++;
    g.sub = sub;
    g.p_mw = row[1];
    g.v_kv = row[5] * data.substations[static_cast<std::size_t>(sub)].base_kv;
    if (bus_type[static_cast<std::size_t>(sub)] == 3 && !slack_assigned) {
      g.slack = true;
      slack_assigned = true;
    }
    data.generators.push_back(g);
  }

  int line_id = 0;
  for (std::size_t r = 0; r < branch.rows.size(); ++r) {
    const auto& row = branch.rows[r];
    if (row[10] <= 0.0) continue;
    if (row[9] != 0.0) {
      throw ParseError("phase-shifting transformers are not supported", branch.row_lines[r], "mpc.branch");
    }
    Line l;
    l.id = line_id++;
    l.sub_or = resolve(row[0], branch.row_lines[r], "mpc.branch");
    l.sub_ex = resolve(row[1], branch.row_lines[r], "mpc.branch");
    l.r = row[2];
    l.x = row[3];
    l.b = row[4];
    l.tap = row[8] == 0.0 ? 1.0 : row[8];
    data.lines.push_back(l);
  }
  return GridCase::create(std::move(data));
}

GridCase parse_case(std::string_view text, const ImportOptions& options) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_native_case(text);
  if (text.find("mpc.") != std::string_view::npos) return parse_matpower_case(text, options);
  throw ParseError("unrecognized case format (expected native JSON or MATPOWER text)", 1, "");
}

GridCase load_case(const std::filesystem::path& path, const ImportOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open case file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str(), options);
}

std::string to_native_json(const GridCase& c) {
  json doc;
  doc["base_mva"] = c.base_mva();
  auto sub_id = [&](int idx) { return c.substations()[static_cast<std::size_t>(idx)].id; };
  doc["substations"] = json::array();
  for (const auto& s : c.substations()) {
    doc["substations"].push_back({{"id", s.id}, {"name", s.name}, {"base_kv", s.base_kv}});
  }
  doc["lines"] = json::array();
  for (const auto& l : c.lines()) {
    doc["lines"].push_back({{"id", l.id},
                            {"or", sub_id(l.sub_or)},
                            {"ex", sub_id(l.sub_ex)},
                            {"r", l.r},
                            {"x", l.x},
                            {"b", l.b},
                            {"tap", l.tap}});
  }
  doc["generators"] = json::array();
  for (const auto& g : c.generators()) {
    doc["generators"].push_back(
        {{"id", g.id}, {"substation", sub_id(g.sub)}, {"p_mw", g.p_mw}, {"v_kv", g.v_kv}, {"slack", g.slack}});
  }
  doc["loads"] = json::array();
  for (const auto& l : c.loads()) {
    doc["loads"].push_back({{"id", l.id}, {"substation", sub_id(l.sub)}, {"p_mw", l.p_mw}, {"q_mvar", l.q_mvar}});
  }
  doc["shunts"] = json::array();
  for (const auto& s : c.shunts()) {
    doc["shunts"].push_back({{"id", s.id}, {"substation", sub_id(s.sub)}, {"g_mw", s.g_mw}, {"b_mvar", s.b_mvar}});
  }
  return doc.dump(2);
}

}  // namespace gridbench::grid
