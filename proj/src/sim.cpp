#include "esaloha/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/core.h>

#include "esaloha/error.hpp"
#include "esaloha/parallel.hpp"

namespace esaloha {

void SimParams::validate() const {
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (slots_per_frame < 1) throw ConfigError("slots_per_frame must be >= 1");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class FrameStream {
 public:
  explicit FrameStream(std::uint64_t seed) : engine_(seed) {}

  // Bernoulli(prob) from the top 53 bits; prob = 1 always fires.
  bool event(double prob) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < prob; }

 private:
  std::mt19937_64 engine_;
};

struct FrameCounts {
  std::vector<std::uint8_t> on;
  std::vector<std::uint32_t> transmissions;
  std::vector<std::uint32_t> successes;
  std::size_t active = 0;

  explicit FrameCounts(std::size_t n) : on(n), transmissions(n), successes(n) {}

  void reset() {
    std::fill(on.begin(), on.end(), 0);
    std::fill(transmissions.begin(), transmissions.end(), 0);
    std::fill(successes.begin(), successes.end(), 0);
    active = 0;
  }
};

// Slotted-ALOHA contention over `slots` slots among the ON users.
void contend(FrameStream& rng, const std::vector<double>& access, std::uint32_t slots,
             FrameCounts& f) {
  const std::size_t n = access.size();
  for (std::uint32_t s = 0; s < slots; ++s) {
    std::size_t transmitters = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!f.on[i] || !rng.event(access[i])) continue;
      ++f.transmissions[i];
      ++transmitters;
      last = i;
    }
    if (transmitters == 1) ++f.successes[last];
  }
}

void draw_modes(FrameStream& rng, const std::vector<double>& q, FrameCounts& f) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    f.on[i] = rng.event(q[i]) ? 1 : 0;
    f.active += f.on[i];
  }
}

struct Moments {
  std::vector<double> t, tt, e, ee;
  std::vector<std::uint64_t> on;
  double a = 0.0, aa = 0.0;

  explicit Moments(std::size_t n) : t(n), tt(n), e(n), ee(n), on(n) {}

  void add(const FrameCounts& f, const SystemConfig& config, std::uint32_t slots) {
    const double s = static_cast<double>(slots);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double thr = f.successes[i] / s;
      const double en = f.on[i] ? config.c1 + config.c2 * (f.transmissions[i] / s) : 0.0;
      t[i] += thr;
      tt[i] += thr * thr;
      e[i] += en;
      ee[i] += en * en;
      on[i] += f.on[i];
    }
    const double active = static_cast<double>(f.active);
    a += active;
    aa += active * active;
  }

  void merge(const Moments& o) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] += o.t[i];
      tt[i] += o.tt[i];
      e[i] += o.e[i];
      ee[i] += o.ee[i];
      on[i] += o.on[i];
    }
    a += o.a;
    aa += o.aa;
  }
};

void mean_and_stderr(double total, double squares, double frames, double& mean, double& se) {
  mean = total / frames;
  if (frames < 2.0) {
    se = 0.0;
    return;
  }
  const double var = std::max(0.0, (squares - total * total / frames) / (frames - 1.0));
  se = std::sqrt(var / frames);
}

template <class FrameFn>
SimEstimate run(const StrategyProfile& profile, const SystemConfig& config,
                const SimParams& params, Variant variant, FrameFn&& frame_fn) {
  config.validate();
  params.validate();
  if (profile.variant != variant)
    throw ConfigError(fmt::format("simulate_{} needs a {} profile", to_string(variant),
                                  to_string(variant)));
  profile.validate(config.size());

  const std::size_t n = config.size();
  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t blocks = (params.frames + kBlock - 1) / kBlock;
  std::vector<Moments> partial(blocks, Moments(n));

  parallel_for(blocks, params.threads, [&](std::size_t b) {
    FrameCounts f(n);
    const std::uint64_t end = std::min(params.frames, (b + 1) * kBlock);
    for (std::uint64_t frame = b * kBlock; frame < end; ++frame) {
      f.reset();
      FrameStream rng(frame_stream_seed(params.seed, frame));
      draw_modes(rng, profile.q, f);
      frame_fn(rng, f);
      assert(std::accumulate(f.successes.begin(), f.successes.end(), 0u) <= params.slots_per_frame);
      partial[b].add(f, config, params.slots_per_frame);
    }
  });

  Moments total(n);
  for (const auto& m : partial) total.merge(m);

  const double frames = static_cast<double>(params.frames);
  SimEstimate est;
  est.mean_throughput.resize(n);
  est.stderr_throughput.resize(n);
  est.mean_energy.resize(n);
  est.stderr_energy.resize(n);
  est.frames_on = total.on;
  for (std::size_t i = 0; i < n; ++i) {
    mean_and_stderr(total.t[i], total.tt[i], frames, est.mean_throughput[i], est.stderr_throughput[i]);
    mean_and_stderr(total.e[i], total.ee[i], frames, est.mean_energy[i], est.stderr_energy[i]);
  }
  mean_and_stderr(total.a, total.aa, frames, est.mean_active_users, est.stderr_active_users);
  return est;
}

}  // namespace

std::uint64_t frame_stream_seed(std::uint64_t master_seed, std::uint64_t frame) noexcept {
  return splitmix64(splitmix64(master_seed) ^ frame);
}

SimEstimate simulate_original(const StrategyProfile& profile, const SystemConfig& config,
                              const SimParams& params) {
  const std::uint32_t slots = params.slots_per_frame;
  return run(profile, config, params, Variant::Original, [&](FrameStream& rng, FrameCounts& f) {
    if (f.active > 0) contend(rng, profile.p, slots, f);
  });
}

SimEstimate simulate_modified(const StrategyProfile& profile, const SystemConfig& config,
                              const SimParams& params) {
  const std::uint32_t slots = params.slots_per_frame;
  return run(profile, config, params, Variant::Modified, [&](FrameStream& rng, FrameCounts& f) {
    if (f.active == 0) return;
    if (f.active == 1) {
      const auto lone = static_cast<std::size_t>(std::find(f.on.begin(), f.on.end(), 1) - f.on.begin());
      f.transmissions[lone] = slots;
      f.successes[lone] = slots;
      return;
    }
    // The probe in slot 1 collides; back-off applies to the remaining slots.
    for (std::size_t i = 0; i < f.on.size(); ++i) f.transmissions[i] += f.on[i];
    contend(rng, profile.p, slots - 1, f);
  });
}

SimEstimate simulate(const StrategyProfile& profile, const SystemConfig& config,
                     const SimParams& params) {
  return profile.variant == Variant::Original ? simulate_original(profile, config, params)
                                              : simulate_modified(profile, config, params);
}

}  // namespace esaloha
