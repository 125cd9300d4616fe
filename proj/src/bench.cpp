#include "dentseg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dentseg/io.hpp"
#include "dentseg/json.hpp"

namespace dentseg {

BenchResult run_bench(const Manifest& manifest, const SegmentationConfig& cfg, std::size_t threads) {
  if (manifest.entries.empty()) throw std::invalid_argument("manifest lists no images");
  cfg.validate();

  BenchResult out;
  out.items.resize(manifest.entries.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < manifest.entries.size(); i = next++) {
      try {
        const auto& entry = manifest.entries[i];
        const GrayImage img = load_image(manifest.resolve(entry.image_path));
        const PhantomTruth truth = load_truth(manifest.resolve(entry.truth_path));
        const SegmentationResult res = segment(img, cfg);
        const ToothScore score = count_correct(res, truth);
        out.items[i] = {i, score.segmented_ok, score.total_teeth, res.tooth_count, res.rotation.mean_degrees};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = manifest.entries.size();
      }
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, manifest.entries.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::size_t n_max = 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& item : out.items) {
    n_max = std::max(n_max, item.total_teeth);
    pairs.emplace_back(item.segmented_ok, item.total_teeth);
  }
  out.matrix = accumulate(pairs, n_max);
  out.report = make_report(out.matrix);
  return out;
}

}  // namespace dentseg
