#include "rfcp/segment_table.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rfcp {

SegmentTable::SegmentTable(ReducedGrid grid) : grid_(std::move(grid)) {
  const std::size_t last = grid_.size() + 1;
  offsets_.resize(last + 1);
  std::size_t off = 0;
  for (std::size_t r = 0; r <= last; ++r) {
    offsets_[r] = off;
    off += last - r;
  }
  values_.assign(off, kLogZero);
}

SegmentTable SegmentTable::fill(const SegmentModel& model, const ReducedGrid& grid,
                                std::size_t workers) {
  if (model.size() != grid.n()) {
    throw std::invalid_argument("segment model covers " + std::to_string(model.size()) +
                                " observations but the grid expects " + std::to_string(grid.n()));
  }
  SegmentTable table(grid);
  const std::size_t last = grid.size() + 1;
  const std::size_t min_len = model.min_segment_len();

  std::atomic<std::size_t> next_row{0};
  std::atomic<std::size_t> failed{0};
  auto work = [&] {
    for (std::size_t r = next_row++; r < last; r = next_row++) {
      const std::size_t start = table.grid_.time(r) + 1;
      LogWeight* out = table.values_.data() + table.offsets_[r];
      for (std::size_t s = r + 1; s <= last; ++s) {
        const std::size_t end = table.grid_.time(s);
        const LogWeight v = model.log_marginal(start, end);
        out[s - r - 1] = std::isnan(v) ? kLogZero : v;
        if (!std::isfinite(v) && end - start + 1 >= min_len) ++failed;
      }
    }
  };

  workers = std::max<std::size_t>(1, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  table.failed_entries_ = failed.load();
  table.min_len_ = min_len;
  return table;
}

SegmentTable SegmentTable::coarsen(std::size_t factor) const {
  if (factor < 1) throw std::invalid_argument("coarsening factor must be at least 1");
  ReducedGrid coarse(grid_.n(), grid_.spacing() * factor);
  SegmentTable out(coarse);
  const std::size_t last = coarse.size() + 1;
  const std::size_t fine_last = grid_.size() + 1;
  auto map = [&](std::size_t r) { return r == last ? fine_last : r * factor; };
  for (std::size_t r = 0; r < last; ++r) {
    for (std::size_t s = r + 1; s <= last; ++s) {
      out.values_[out.index(r, s)] = at(map(r), map(s));
    }
  }
  out.min_len_ = min_len_;
  for (std::size_t r = 0; r < last; ++r) {
    for (std::size_t s = r + 1; s <= last; ++s) {
      if (!std::isfinite(out.at(r, s)) && coarse.time(s) - coarse.time(r) >= min_len_) {
        ++out.failed_entries_;
      }
    }
  }
  return out;
}

}  // namespace rfcp
