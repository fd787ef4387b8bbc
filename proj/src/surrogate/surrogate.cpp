#include "gridbench/surrogate/surrogate.hpp"

#include <algorithm>
#include <chrono>

#include "gridbench/error.hpp"

namespace gridbench::surrogate {

metrics::PredictionSet timed_predict(const AugmentedSimulator& model, std::span<const scenario::Sample> inputs,
                                     std::size_t batch_size, InferenceTiming* timing) {
  if (batch_size == 0) throw ValidationError("inference batch size must be positive");
  metrics::PredictionSet out;
  out.samples.reserve(inputs.size());
  if (inputs.empty()) return out;

  (void)model.predict(inputs.first(std::min(batch_size, inputs.size())));  // warm-up

  const auto t0 = std::chrono::steady_clock::now();
  std::size_t batches = 0;
  for (std::size_t start = 0; start < inputs.size(); start += batch_size) {
    auto part = model.predict(inputs.subspan(start, std::min(batch_size, inputs.size() - start)));
    for (auto& f : part.samples) out.samples.push_back(std::move(f));
    ++batches;
  }
  if (timing) {
    timing->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing->batches = batches;
  }
  if (out.size() != inputs.size()) throw ValidationError(model.name() + " returned the wrong number of predictions");
  return out;
}

}  // namespace gridbench::surrogate
