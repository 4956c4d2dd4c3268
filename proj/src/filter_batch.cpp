#include <cstddef>
#include <exception>

#include "pcbf/errors.hpp"
#include "pcbf/filter.hpp"

namespace pcbf {

namespace {

void check_sizes(std::span<const SlabInstance> in, std::span<FilterResult> out)
{
  if (in.size() != out.size()) { throw UsageError("solve_batch: input and output sizes differ"); }
}

}  // namespace

void solve_batch_serial(std::span<const SlabInstance> in, std::span<FilterResult> out)
{
  check_sizes(in, out);
  for (std::size_t i = 0; i < in.size(); ++i) { out[i] = solve_closed_form(in[i].slab, in[i].u0); }
}

void solve_batch(std::span<const SlabInstance> in, std::span<FilterResult> out)
{
  check_sizes(in, out);
  const auto count = static_cast<std::ptrdiff_t>(in.size());

  // Exceptions may not cross the parallel region; keep the first one and rethrow.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = solve_closed_form(in[i].slab, in[i].u0);
    } catch (...) {
#pragma omp critical(pcbf_batch_failure)
      if (!failure) { failure = std::current_exception(); }
    }
  }
  if (failure) { std::rethrow_exception(failure); }
}

}  // namespace pcbf
