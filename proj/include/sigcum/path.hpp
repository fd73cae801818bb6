#pragma once

#include "sigcum/json_io.hpp"
#include "sigcum/tensor.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace sigcum {

enum class EventKind { Linear, Jump };

// Linear: the driver moves at constant rate by `value` over [time, time + duration].
// Jump: the driver jumps by `value` at `time`.
template <class S>
struct PathEvent {
  double time = 0.0;
  EventKind kind = EventKind::Jump;
  double duration = 0.0;
  Tensor<S> value;
};

// A piece of the path restricted to a window: a linear stretch over [start, end]
// carrying its share of the increment, or a jump at start == end.
template <class S>
struct PathAtom {
  EventKind kind;
  double start;
  double end;
  Tensor<S> value;
};

// Deterministic càdlàg driver: piecewise-linear stretches plus jumps.
template <class S>
class CadlagPath {
 public:
  explicit CadlagPath(AlgebraShape shape, double origin = 0.0)
      : shape_(std::move(shape)), origin_(origin), horizon_(origin), linear_end_(origin),
        last_time_(origin) {}

  const AlgebraShape& shape() const { return shape_; }
  double origin() const { return origin_; }
  double horizon() const { return horizon_; }
  const std::vector<PathEvent<S>>& events() const { return events_; }
  bool empty() const { return events_.empty(); }

  void add_linear(double t, double dt, Tensor<S> increment) {
    check_common(t, increment);
    if (!(dt > 0.0)) throw DomainError("linear event needs a positive duration");
    if (t < linear_end_)
      throw DomainError("linear event at t=" + std::to_string(t) +
                        " overlaps the previous linear event ending at " + std::to_string(linear_end_));
    linear_end_ = t + dt;
    horizon_ = std::max(horizon_, linear_end_);
    last_time_ = t;
    events_.push_back({t, EventKind::Linear, dt, std::move(increment)});
  }

  void add_jump(double t, Tensor<S> jump) {
    check_common(t, jump);
    if (t == origin_) throw DomainError("a jump at the origin time lies outside every window (s, t]");
    horizon_ = std::max(horizon_, t);
    last_time_ = t;
    events_.push_back({t, EventKind::Jump, 0.0, std::move(jump)});
  }

  bool has_jumps_in(double s, double t) const {
    for (const auto& e : events_)
      if (e.kind == EventKind::Jump && e.time > s && e.time <= t) return true;
    return false;
  }

  // Time-ordered atoms inside (s, t]. Linear stretches are split at interior jumps; a jump
  // at u comes after linear motion up to u and before motion after u.
  std::vector<PathAtom<S>> atoms(double s, double t) const {
    if (s < origin_ || t > horizon_ || s > t)
      throw DomainError("interval [" + std::to_string(s) + ", " + std::to_string(t) +
                        "] outside the path domain [" + std::to_string(origin_) + ", " +
                        std::to_string(horizon_) + "]");
    std::vector<double> jump_times;
    for (const auto& e : events_)
      if (e.kind == EventKind::Jump && e.time > s && e.time <= t) jump_times.push_back(e.time);
    struct Keyed {
      double key;
      int order;
      std::size_t seq;
      PathAtom<S> atom;
    };
    std::vector<Keyed> items;
    std::size_t seq = 0;
    for (const auto& e : events_) {
      if (e.kind == EventKind::Jump) {
        if (e.time > s && e.time <= t) items.push_back({e.time, 1, seq++, {EventKind::Jump, e.time, e.time, e.value}});
        continue;
      }
      const double a = e.time, b = e.time + e.duration;
      const double lo = std::max(a, s), hi = std::min(b, t);
      if (!(hi > lo)) continue;
      std::vector<double> cuts{lo};
      for (double u : jump_times)
        if (u > lo && u < hi) cuts.push_back(u);
      cuts.push_back(hi);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double p = cuts[k], q = cuts[k + 1];
        Tensor<S> v = e.value;
        if (!(p == a && q == b)) v *= ScalarTraits<S>::from_double((q - p) / e.duration);
        items.push_back({q, 0, seq++, {EventKind::Linear, p, q, std::move(v)}});
      }
    }
    std::stable_sort(items.begin(), items.end(), [](const Keyed& x, const Keyed& y) {
      if (x.key != y.key) return x.key < y.key;
      if (x.order != y.order) return x.order < y.order;
      return x.seq < y.seq;
    });
    std::vector<PathAtom<S>> out;
    out.reserve(items.size());
    for (auto& it : items) out.push_back(std::move(it.atom));
    return out;
  }

  // Sum of all increments in (s, t].
  Tensor<S> total_increment(double s, double t) const {
    Tensor<S> r(shape_);
    for (const auto& a : atoms(s, t)) r += a.value;
    return r;
  }

 private:
  void check_common(double t, const Tensor<S>& v) const {
    require_same_shape(shape_, v.shape(), "path event");
    require_T0(v, "path event");
    if (!std::isfinite(t)) throw DomainError("event time must be finite");
    if (t < origin_) throw DomainError("event time precedes the path origin");
    if (t < last_time_)
      throw DomainError("event times must be non-decreasing (" + std::to_string(t) + " after " +
                        std::to_string(last_time_) + ")");
  }

  AlgebraShape shape_;
  double origin_;
  double horizon_;
  double linear_end_;
  double last_time_;
  std::vector<PathEvent<S>> events_;
};

// One JSON object per line: {"t", "kind": "linear"|"jump", "dt" (linear only), "value": tensor}.
// Event values are padded or truncated to depth N; their alphabet must be d.
template <class S>
CadlagPath<S> read_path_jsonl(std::istream& in, int d, int depth, double origin = 0.0) {
  CadlagPath<S> path(AlgebraShape(d, depth), origin);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    try {
      const json j = json::parse(line);
      if (!j.is_object() || !j.contains("t") || !j["t"].is_number() || !j.contains("kind") ||
          !j["kind"].is_string() || !j.contains("value"))
        throw InputError("event needs numeric 't', string 'kind' and 'value'");
      const double t = j["t"].get<double>();
      Tensor<S> v = tensor_from_json<S>(j["value"]);
      if (v.dim() != d)
        throw InputError("event alphabet d=" + std::to_string(v.dim()) + " differs from " + std::to_string(d));
      v = resize_depth(v, depth);
      const std::string kind = j["kind"].get<std::string>();
      if (kind == "linear") {
        if (!j.contains("dt") || !j["dt"].is_number()) throw InputError("linear event needs numeric 'dt'");
        path.add_linear(t, j["dt"].get<double>(), std::move(v));
      } else if (kind == "jump") {
        path.add_jump(t, std::move(v));
      } else {
        throw InputError("unknown event kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw InputError(where + e.what());
    } catch (const Error& e) {
      throw InputError(where + e.what());
    }
  }
  return path;
}

template <class S>
void write_path_jsonl(std::ostream& out, const CadlagPath<S>& path) {
  for (const auto& e : path.events()) {
    json j{{"t", e.time}, {"kind", e.kind == EventKind::Linear ? "linear" : "jump"}};
    if (e.kind == EventKind::Linear) j["dt"] = e.duration;
    j["value"] = to_json(e.value);
    out << j.dump() << '\n';
  }
}

extern template class CadlagPath<double>;
extern template class CadlagPath<Rational>;

}  // namespace sigcum
