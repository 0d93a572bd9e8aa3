#include "decstore/byte_diff.hpp"

#include <optional>
#include <vector>

namespace decstore {

namespace {

enum class Op : std::uint8_t { Keep, Del, Ins };

// Myers' greedy O(ND) search over a[0..n) and b[0..m). Returns the operation
// sequence, or nothing when a limit is hit.
std::optional<std::vector<Op>> myers(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                                     const DiffLimits& limits) {
  const long n = static_cast<long>(a.size());
  const long m = static_cast<long>(b.size());
  const long max_d = std::min<long>(n + m, static_cast<long>(limits.max_edit_distance));
  const long off = max_d + 1;
  std::vector<long> v(static_cast<std::size_t>(2 * max_d + 3), 0);
  std::vector<std::vector<long>> trace;
  std::size_t work = 0;
  long found = -1;
  for (long d = 0; d <= max_d && found < 0; ++d) {
    trace.emplace_back(v.begin() + (off - d), v.begin() + (off + d + 1));
    for (long k = -d; k <= d; k += 2) {
      long x;
      if (k == -d || (k != d && v[off + k - 1] < v[off + k + 1])) {
        x = v[off + k + 1];
      } else {
        x = v[off + k - 1] + 1;
      }
      long y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
        if (++work > limits.max_work) return std::nullopt;
      }
      v[off + k] = x;
      if (x >= n && y >= m) {
        found = d;
        break;
      }
    }
  }
  if (found < 0) return std::nullopt;

  std::vector<Op> ops;
  long x = n;
  long y = m;
  for (long d = found; d > 0; --d) {
    // trace[d] holds diagonals -d..d as they were before round d.
    const std::vector<long>& pv = trace[static_cast<std::size_t>(d)];
    const long k = x - y;
    long prev_k;
    if (k == -d || (k != d && pv[d + k - 1] < pv[d + k + 1])) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    const long prev_x = pv[d + prev_k];
    const long prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      ops.push_back(Op::Keep);
      --x;
      --y;
    }
    ops.push_back(x == prev_x ? Op::Ins : Op::Del);
    x = prev_x;
    y = prev_y;
  }
  while (x > 0 && y > 0) {
    ops.push_back(Op::Keep);
    --x;
    --y;
  }
  return std::vector<Op>(ops.rbegin(), ops.rend());
}

void emit(EditScript& out, std::size_t pos, std::size_t del_len, std::span<const std::uint8_t> inserted) {
  if (del_len == 0 && inserted.empty()) return;
  if (del_len == inserted.size()) {
    out.push_back(Edit::alter(pos, Units(inserted.begin(), inserted.end())));
    return;
  }
  if (del_len > 0) out.push_back(Edit::erase(pos, del_len));
  if (!inserted.empty()) out.push_back(Edit::insert(pos + del_len, Units(inserted.begin(), inserted.end())));
}

}  // namespace

EditScript diff_bytes(std::span<const std::uint8_t> from, std::span<const std::uint8_t> to, DiffLimits limits) {
  std::size_t prefix = 0;
  while (prefix < from.size() && prefix < to.size() && from[prefix] == to[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < from.size() - prefix && suffix < to.size() - prefix &&
         from[from.size() - 1 - suffix] == to[to.size() - 1 - suffix]) {
    ++suffix;
  }
  const auto a = from.subspan(prefix, from.size() - prefix - suffix);
  const auto b = to.subspan(prefix, to.size() - prefix - suffix);

  EditScript out;
  const auto ops = myers(a, b, limits);
  if (!ops) {
    emit(out, prefix, a.size(), b);
    return out;
  }
  // Group maximal runs of deletions and insertions between kept bytes.
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t at = 0;
  while (at < ops->size()) {
    if ((*ops)[at] == Op::Keep) {
      ++i;
      ++j;
      ++at;
      continue;
    }
    const std::size_t start_i = i;
    const std::size_t start_j = j;
    while (at < ops->size() && (*ops)[at] != Op::Keep) {
      if ((*ops)[at] == Op::Del) {
        ++i;
      } else {
        ++j;
      }
      ++at;
    }
    emit(out, prefix + start_i, i - start_i, b.subspan(start_j, j - start_j));
  }
  return out;
}

}  // namespace decstore
