#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gridbench::grid {

struct Substation {
  int id = 0;
  std::string name;
  double base_kv = 0.0;
};

/// Pi-model branch. Impedances are per-unit on the case base; `tap` is the
/// off-nominal ratio on the origin side (1.0 for plain lines).
struct Line {
  int id = 0;
  int sub_or = 0;  // substation index (not id)
  int sub_ex = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;
  double tap = 1.0;
};

struct Generator {
  int id = 0;
  int sub = 0;
  double p_mw = 0.0;
  double v_kv = 0.0;
  bool slack = false;
};

struct Load {
  int id = 0;
  int sub = 0;
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

/// Fixed shunt, specified as consumption at 1 pu voltage. Shunts always sit
/// on busbar 1 of their substation and are not part of the element roster.
struct Shunt {
  int id = 0;
  int sub = 0;
  double g_mw = 0.0;
  double b_mvar = 0.0;
};

enum class ElementKind { Load, Generator, LineOr, LineEx };

struct ElementRef {
  ElementKind kind;
  int index;
  friend bool operator==(const ElementRef&, const ElementRef&) = default;
};

/// Raw case description prior to validation. Element `sub` fields hold
/// substation indices into `substations`.
struct CaseData {
  double base_mva = 100.0;
  std::vector<Substation> substations;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<Shunt> shunts;
};

/// Validated, immutable grid description.
///
/// Every substation owns a roster of element endpoints, ordered loads,
/// generators, line origins, line extremities (ascending index within each
/// kind). The concatenation of all rosters in substation order defines the
/// layout of a topology vector.
class GridCase {
 public:
  /// Validates `data` and builds the roster index. Throws ValidationError.
  static GridCase create(CaseData data);

  double base_mva() const noexcept { return data_.base_mva; }
  const std::vector<Substation>& substations() const noexcept { return data_.substations; }
  const std::vector<Line>& lines() const noexcept { return data_.lines; }
  const std::vector<Generator>& generators() const noexcept { return data_.generators; }
  const std::vector<Load>& loads() const noexcept { return data_.loads; }
  const std::vector<Shunt>& shunts() const noexcept { return data_.shunts; }
  const CaseData& data() const noexcept { return data_; }

  std::size_t substation_count() const noexcept { return data_.substations.size(); }
  std::size_t line_count() const noexcept { return data_.lines.size(); }
  std::size_t element_count() const noexcept { return roster_flat_.size(); }
  int slack_generator() const noexcept { return slack_; }

  const std::vector<ElementRef>& roster(int sub) const { return rosters_.at(static_cast<std::size_t>(sub)); }
  /// Position of the first roster entry of `sub` in a topology vector.
  std::size_t roster_offset(int sub) const { return offsets_.at(static_cast<std::size_t>(sub)); }
  /// Topology-vector position of an element endpoint.
  std::size_t position(ElementRef ref) const;
  const std::vector<ElementRef>& elements() const noexcept { return roster_flat_; }
  /// Substation index hosting an element endpoint.
  int substation_of(ElementRef ref) const;

  std::optional<int> substation_index(int id) const;
  std::optional<int> line_index(int id) const;

 private:
  GridCase() = default;

  CaseData data_;
  int slack_ = -1;
  std::vector<std::vector<ElementRef>> rosters_;
  std::vector<std::size_t> offsets_;
  std::vector<ElementRef> roster_flat_;
  std::vector<std::size_t> load_pos_, gen_pos_, or_pos_, ex_pos_;
};

}  // namespace gridbench::grid
