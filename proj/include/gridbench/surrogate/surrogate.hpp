#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "gridbench/metrics/prediction.hpp"
#include "gridbench/scenario/dataset.hpp"

namespace gridbench::surrogate {

/// Input groups a model reads from each sample.
struct Capabilities {
  bool injections = true;
  bool topology = true;
  bool physics_attributes = false;
};

/// Contract for every evaluated model. predict() only reads the inputs of
/// the samples (injections, topology, physics attributes), never their
/// stored outputs, and must be deterministic once fit() has run.
class AugmentedSimulator {
 public:
  virtual ~AugmentedSimulator() = default;

  virtual std::string name() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual void fit(const scenario::Dataset& train) = 0;
  virtual metrics::PredictionSet predict(std::span<const scenario::Sample> inputs) const = 0;
};

struct InferenceTiming {
  double seconds = 0.0;  // timed passes only
  std::size_t batches = 0;
};

/// Runs predict over `inputs` in chunks of `batch_size` samples. One
/// untimed warm-up chunk precedes the timed pass.
metrics::PredictionSet timed_predict(const AugmentedSimulator& model, std::span<const scenario::Sample> inputs,
                                     std::size_t batch_size, InferenceTiming* timing = nullptr);

}  // namespace gridbench::surrogate
