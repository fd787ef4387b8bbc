#include "gridbench/grid/case.hpp"

#include <cmath>
#include <set>
#include <string>

#include "gridbench/error.hpp"

namespace gridbench::grid {

namespace {

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* what) {
  std::set<int> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) {
      throw ValidationError(std::string("duplicate ") + what + " id " + std::to_string(item.id));
    }
  }
}

void check_sub(int sub, std::size_t count, const std::string& who) {
  if (sub < 0 || static_cast<std::size_t>(sub) >= count) {
    throw ValidationError(who + " references a substation that does not exist");
  }
}

}  // namespace

GridCase GridCase::create(CaseData data) {
  if (!(data.base_mva > 0.0)) throw ValidationError("base power must be positive");
  if (data.substations.empty()) throw ValidationError("case has no substations");
  check_unique_ids(data.substations, "substation");
  check_unique_ids(data.lines, "line");
  check_unique_ids(data.generators, "generator");
  check_unique_ids(data.loads, "load");
  check_unique_ids(data.shunts, "shunt");

  const std::size_t n_sub = data.substations.size();
  for (const auto& s : data.substations) {
    if (!(s.base_kv > 0.0)) {
      throw ValidationError("substation " + std::to_string(s.id) + " has a non-positive base voltage");
    }
  }
  for (const auto& l : data.lines) {
    const std::string who = "line " + std::to_string(l.id);
    check_sub(l.sub_or, n_sub, who);
    check_sub(l.sub_ex, n_sub, who);
    if (l.sub_or == l.sub_ex) throw ValidationError(who + " connects a substation to itself");
    if (!(l.r >= 0.0)) throw ValidationError(who + " has negative resistance");
    if (!std::isfinite(l.x) || !std::isfinite(l.b)) throw ValidationError(who + " has non-finite parameters");
    if (!(l.tap > 0.0)) throw ValidationError(who + " has a non-positive tap ratio");
  }
  int slack = -1;
  for (std::size_t g = 0; g < data.generators.size(); ++g) {
    const auto& gen = data.generators[g];
    check_sub(gen.sub, n_sub, "generator " + std::to_string(gen.id));
    if (!(gen.v_kv > 0.0)) {
      throw ValidationError("generator " + std::to_string(gen.id) + " has a non-positive voltage setpoint");
    }
    if (gen.slack) {
      if (slack >= 0) throw ValidationError("case must have exactly one slack generator (found more than one)");
      slack = static_cast<int>(g);
    }
  }
  if (slack < 0) throw ValidationError("case must have exactly one slack generator (found none)");
  for (const auto& l : data.loads) check_sub(l.sub, n_sub, "load " + std::to_string(l.id));
  for (const auto& s : data.shunts) check_sub(s.sub, n_sub, "shunt " + std::to_string(s.id));

  GridCase c;
  c.data_ = std::move(data);
  c.slack_ = slack;
  const auto& d = c.data_;
  c.rosters_.assign(n_sub, {});
  for (std::size_t i = 0; i < d.loads.size(); ++i) {
    c.rosters_[static_cast<std::size_t>(d.loads[i].sub)].push_back({ElementKind::Load, static_cast<int>(i)});
  }
  for (std::size_t i = 0; i < d.generators.size(); ++i) {
    c.rosters_[static_cast<std::size_t>(d.generators[i].sub)].push_back(
        {ElementKind::Generator, static_cast<int>(i)});
  }
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    c.rosters_[static_cast<std::size_t>(d.lines[i].sub_or)].push_back({ElementKind::LineOr, static_cast<int>(i)});
  }
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    c.rosters_[static_cast<std::size_t>(d.lines[i].sub_ex)].push_back({ElementKind::LineEx, static_cast<int>(i)});
  }

  c.load_pos_.resize(d.loads.size());
  c.gen_pos_.resize(d.generators.size());
  c.or_pos_.resize(d.lines.size());
  c.ex_pos_.resize(d.lines.size());
  c.offsets_.resize(n_sub);
  std::size_t pos = 0;
  for (std::size_t s = 0; s < n_sub; ++s) {
    c.offsets_[s] = pos;
    for (const auto& ref : c.rosters_[s]) {
      const auto idx = static_cast<std::size_t>(ref.index);
      switch (ref.kind) {
        case ElementKind::Load: c.load_pos_[idx] = pos; break;
        case ElementKind::Generator: c.gen_pos_[idx] = pos; break;
        case ElementKind::LineOr: c.or_pos_[idx] = pos; break;
        case ElementKind::LineEx: c.ex_pos_[idx] = pos; break;
      }
      c.roster_flat_.push_back(ref);
      ++pos;
    }
  }
  return c;
}

std::size_t GridCase::position(ElementRef ref) const {
  const auto idx = static_cast<std::size_t>(ref.index);
  switch (ref.kind) {
    case ElementKind::Load: return load_pos_.at(idx);
    case ElementKind::Generator: return gen_pos_.at(idx);
    case ElementKind::LineOr: return or_pos_.at(idx);
    case ElementKind::LineEx: return ex_pos_.at(idx);
  }
  return 0;
}

int GridCase::substation_of(ElementRef ref) const {
  const auto idx = static_cast<std::size_t>(ref.index);
  switch (ref.kind) {
    case ElementKind::Load: return data_.loads.at(idx).sub;
    case ElementKind::Generator: return data_.generators.at(idx).sub;
    case ElementKind::LineOr: return data_.lines.at(idx).sub_or;
    case ElementKind::LineEx: return data_.lines.at(idx).sub_ex;
  }
  return -1;
}

std::optional<int> GridCase::substation_index(int id) const {
  for (std::size_t s = 0; s < data_.substations.size(); ++s) {
    if (data_.substations[s].id == id) return static_cast<int>(s);
  }
  return std::nullopt;
}

std::optional<int> GridCase::line_index(int id) const {
  for (std::size_t l = 0; l < data_.lines.size(); ++l) {
    if (data_.lines[l].id == id) return static_cast<int>(l);
  }
  return std::nullopt;
}

}  // namespace gridbench::grid
