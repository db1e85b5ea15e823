#include "admpriors/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "admpriors/error.hpp"

namespace admpriors {

namespace {

using IVec = std::array<long, 3>;

double form(const Mat& a, const IVec& x, const IVec& y, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += a(i, j) * static_cast<double>(x[i] * y[j]);
  return s;
}

Offset canonical(const IVec& v, int d) {
  Offset e{0, 0, 0};
  int sign = 0;
  for (int i = 0; i < d && sign == 0; ++i) {
    if (v[i] != 0) sign = v[i] > 0 ? 1 : -1;
  }
  for (int i = 0; i < d; ++i) e[i] = static_cast<int>(sign * v[i]);
  return e;
}

constexpr int kMaxSellingSteps = 10000;

std::vector<OffsetWeight> selling_2d(const Mat& a) {
  std::array<IVec, 3> b{IVec{1, 0, 0}, IVec{0, 1, 0}, IVec{-1, -1, 0}};
  const double thr = 1e-14 * a.trace();
  for (int step = 0; step < kMaxSellingSteps; ++step) {
    bool flipped = false;
    for (int i = 0; i < 3 && !flipped; ++i) {
      for (int j = i + 1; j < 3 && !flipped; ++j) {
        if (form(a, b[i], b[j], 2) > thr) {
          const int k = 3 - i - j;
          for (int c = 0; c < 2; ++c) {
            b[k][c] = b[i][c] - b[j][c];
            b[i][c] = -b[i][c];
          }
          flipped = true;
        }
      }
    }
    if (!flipped) {
      std::vector<OffsetWeight> out;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        const double rho = -form(a, b[i], b[j], 2);
        if (rho > 0.0) out.push_back({canonical(IVec{-b[k][1], b[k][0], 0}, 2), rho});
      }
      return out;
    }
  }
  throw Error(ErrorCode::NonConvergence, "selling_decomposition: reduction did not terminate");
}

std::vector<OffsetWeight> selling_3d(const Mat& a) {
  std::array<IVec, 4> b{IVec{1, 0, 0}, IVec{0, 1, 0}, IVec{0, 0, 1}, IVec{-1, -1, -1}};
  const double thr = 1e-14 * a.trace();
  for (int step = 0; step < kMaxSellingSteps; ++step) {
    bool flipped = false;
    for (int i = 0; i < 4 && !flipped; ++i) {
      for (int j = i + 1; j < 4 && !flipped; ++j) {
        if (form(a, b[i], b[j], 3) > thr) {
          for (int k = 0; k < 4; ++k) {
            if (k == i || k == j) continue;
            for (int c = 0; c < 3; ++c) b[k][c] += b[i][c];
          }
          for (int c = 0; c < 3; ++c) b[i][c] = -b[i][c];
          flipped = true;
        }
      }
    }
    if (!flipped) {
      std::vector<OffsetWeight> out;
      for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
          int k = -1, l = -1;
          for (int m = 0; m < 4; ++m) {
            if (m == i || m == j) continue;
            (k < 0 ? k : l) = m;
          }
          const double rho = -form(a, b[i], b[j], 3);
          const IVec e{b[k][1] * b[l][2] - b[k][2] * b[l][1], b[k][2] * b[l][0] - b[k][0] * b[l][2],
                       b[k][0] * b[l][1] - b[k][1] * b[l][0]};
          if (rho > 0.0) out.push_back({canonical(e, 3), rho});
        }
      }
      return out;
    }
  }
  throw Error(ErrorCode::NonConvergence, "selling_decomposition: reduction did not terminate");
}

double weight_for(const std::vector<OffsetWeight>& dec, const Offset& e) {
  for (const auto& ow : dec) {
    if (ow.offset == e) return ow.weight;
  }
  return 0.0;
}

Mat scaled(const TensorField& a, std::size_t node) {
  const Grid& g = a.grid();
  Mat m = a.at(node);
  for (int i = 0; i < g.dimension(); ++i)
    for (int j = 0; j < g.dimension(); ++j) m(i, j) /= g.spacing(i) * g.spacing(j);
  return m;
}

void require_interior_definite(const TensorField& a) {
  const Grid& g = a.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_interior(k) && !is_positive_definite(a.at(k))) {
      throw Error(ErrorCode::NonPositive,
                  "divergence operator: coefficient not positive definite at interior node " + std::to_string(k));
    }
  }
}

}  // namespace

std::vector<OffsetWeight> selling_decomposition(const Mat& a) {
  switch (a.rows()) {
    case 1:
      return {{Offset{1, 0, 0}, a(0, 0)}};
    case 2:
      return selling_2d(a);
    case 3:
      return selling_3d(a);
    default:
      throw Error(ErrorCode::InvalidArgument, "selling_decomposition: dimension must be 1, 2 or 3");
  }
}

DivergenceOperator::DivergenceOperator(const TensorField& a, DivergenceScheme scheme)
    : grid_(a.grid()), scheme_(scheme) {
  require_interior_definite(a);
  row_start_.assign(grid_.size() + 1, 0);
  diagonal_.assign(grid_.size(), 0.0);
  if (scheme == DivergenceScheme::Monotone) {
    build_monotone(a);
  } else {
    build_nested_central(a);
  }
}

void DivergenceOperator::finish_row(std::size_t node, std::vector<Entry>& row) {
  std::sort(row.begin(), row.end(), [](const Entry& x, const Entry& y) { return x.column < y.column; });
  std::size_t start = entries_.size();
  for (const auto& e : row) {
    if (entries_.size() > start && entries_.back().column == e.column) {
      entries_.back().coefficient += e.coefficient;
    } else {
      entries_.push_back(e);
    }
  }
  for (std::size_t k = start; k < entries_.size(); ++k) {
    if (entries_[k].column == node) diagonal_[node] = entries_[k].coefficient;
  }
  row_start_[node + 1] = entries_.size();
  row.clear();
}

void DivergenceOperator::build_monotone(const TensorField& a) {
  const Grid& g = grid_;
  const int d = g.dimension();
  const std::size_t n = g.size();

  // Per-node decompositions; nodes where the coefficient is not definite
  // (possible on edges) borrow the interior node's weights.
  std::vector<std::vector<OffsetWeight>> dec(n);
  std::vector<char> valid(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const Mat m = scaled(a, k);
    if (g.is_interior(k) || is_positive_definite(m)) {
      dec[k] = selling_decomposition(m);
      valid[k] = 1;
    }
  }

  auto shifted = [&](const std::array<std::size_t, 3>& idx, const Offset& e, int sign, bool& inside) {
    std::array<std::size_t, 3> out{0, 0, 0};
    inside = true;
    for (int i = 0; i < d; ++i) {
      const long v = static_cast<long>(idx[i]) + sign * e[i];
      if (v < 0 || v >= static_cast<long>(g.nodes(i))) inside = false;
      out[i] = static_cast<std::size_t>(std::max(0L, v));
    }
    return out;
  };

  // Offsets whose edges touch node k through a neighbour's decomposition.
  std::vector<std::vector<Offset>> extra(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!valid[k]) continue;
    const auto idx = g.multi_index(k);
    for (const auto& ow : dec[k]) {
      for (int sign : {1, -1}) {
        bool inside = false;
        const auto t = shifted(idx, ow.offset, sign, inside);
        if (inside) {
          const std::size_t m = g.flat_index(t);
          if (g.is_interior(m)) extra[m].push_back(ow.offset);
        }
      }
    }
  }

  std::vector<Entry> row;
  for (std::size_t k = 0; k < n; ++k) {
    row_start_[k + 1] = entries_.size();
    if (!g.is_interior(k)) continue;
    const auto idx = g.multi_index(k);
    std::vector<Offset> offsets;
    for (const auto& ow : dec[k]) offsets.push_back(ow.offset);
    offsets.insert(offsets.end(), extra[k].begin(), extra[k].end());
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

    double diag = 0.0;
    for (const Offset& e : offsets) {
      const double own = weight_for(dec[k], e);
      struct Arm {
        std::vector<std::pair<std::size_t, double>> nodes;
        double t;
        double w;
      };
      std::array<Arm, 2> arms;
      for (int s = 0; s < 2; ++s) {
        const int sign = s == 0 ? 1 : -1;
        bool inside = false;
        const auto target = shifted(idx, e, sign, inside);
        Arm& arm = arms[s];
        if (inside) {
          const std::size_t m = g.flat_index(target);
          const double other = valid[m] ? weight_for(dec[m], e) : own;
          arm.nodes = {{m, 1.0}};
          arm.t = 1.0;
          arm.w = 0.5 * (own + other);
        } else {
          double t = 1.0;
          for (int i = 0; i < d; ++i) {
            const int step = sign * e[i];
            if (step > 0) t = std::min(t, static_cast<double>(g.nodes(i) - 1 - idx[i]) / step);
            if (step < 0) t = std::min(t, static_cast<double>(idx[i]) / -step);
          }
          std::array<double, 3> q{0, 0, 0};
          for (int i = 0; i < d; ++i) q[i] = static_cast<double>(idx[i]) + t * sign * e[i];
          arm.nodes = g.interpolation_weights(q);
          arm.t = t;
          arm.w = own;
        }
      }
      const double tsum = arms[0].t + arms[1].t;
      for (const Arm& arm : arms) {
        if (arm.w == 0.0) continue;
        const double c = arm.w * 2.0 / (tsum * arm.t);
        for (const auto& [m, wt] : arm.nodes) row.push_back({m, c * wt});
        diag -= c;
      }
      for (int i = 0; i < d; ++i) max_reach_ = std::max(max_reach_, std::abs(e[i]));
    }
    row.push_back({k, diag});
    finish_row(k, row);
  }
}

void DivergenceOperator::build_nested_central(const TensorField& a) {
  const Grid& g = grid_;
  const int d = g.dimension();
  std::vector<Entry> row;
  for (std::size_t k = 0; k < g.size(); ++k) {
    row_start_[k + 1] = entries_.size();
    if (!g.is_interior(k)) continue;
    double diag = 0.0;
    for (int i = 0; i < d; ++i) {
      const std::size_t si = g.stride(i);
      const double hi2 = g.spacing(i) * g.spacing(i);
      const double ap = 0.5 * (a.entry(k, i, i) + a.entry(k + si, i, i)) / hi2;
      const double am = 0.5 * (a.entry(k, i, i) + a.entry(k - si, i, i)) / hi2;
      row.push_back({k + si, ap});
      row.push_back({k - si, am});
      diag -= ap + am;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        const std::size_t sj = g.stride(j);
        const double c = 1.0 / (4.0 * g.spacing(i) * g.spacing(j));
        const double cp = c * a.entry(k + si, i, j);
        const double cm = c * a.entry(k - si, i, j);
        row.push_back({k + si + sj, cp});
        row.push_back({k + si - sj, -cp});
        row.push_back({k - si + sj, -cm});
        row.push_back({k - si - sj, cm});
      }
    }
    row.push_back({k, diag});
    finish_row(k, row);
  }
}

double DivergenceOperator::apply_at(std::span<const double> u, std::size_t node) const {
  double s = 0.0;
  for (const auto& e : row(node)) s += e.coefficient * u[e.column];
  return s;
}

ScalarField DivergenceOperator::apply(const ScalarField& u) const {
  if (!u.grid().same_layout(grid_)) throw Error(ErrorCode::InvalidArgument, "divergence operator: grid mismatch");
  std::vector<double> out(grid_.size(), 0.0);
  const auto v = u.values();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (grid_.is_interior(k)) out[k] = apply_at(v, k);
  }
  return ScalarField(grid_, std::move(out), Support::Interior);
}

ScalarField divergence_form_apply(const TensorField& a, const ScalarField& u, DivergenceScheme scheme) {
  return DivergenceOperator(a, scheme).apply(u);
}

}  // namespace admpriors
