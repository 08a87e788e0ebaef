#include <benchmark/benchmark.h>

#include <thread>
#include <vector>

#include "csmsim/channel.hpp"

namespace {

using csmsim::Channel;
using csmsim::ChannelMode;

// Full send/recv round per iteration with a dedicated receiver thread.
void channel_stream(benchmark::State& state, ChannelMode mode) {
  const auto size = static_cast<std::size_t>(state.range(0));
  Channel ch(mode, size);
  std::vector<std::byte> payload(size, std::byte{0x5a});
  std::thread rx([&] {
    std::vector<std::byte> out(size);
    while (true) {
      auto r = ch.recv(out);
      if (!r || r.value() == 0) break;
    }
  });
  for (auto _ : state) {
    if (!ch.send(payload)) state.SkipWithError("send failed");
  }
  (void)ch.send({});  // zero-length message stops the receiver
  rx.join();
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * size));
}

void seal_only(benchmark::State& state, ChannelMode mode) {
  // Single-threaded send+recv pair: the per-message cost without handoff.
  const auto size = static_cast<std::size_t>(state.range(0));
  Channel ch(mode, size);
  std::vector<std::byte> payload(size, std::byte{0x5a}), out(size);
  for (auto _ : state) {
    (void)ch.send(payload);
    benchmark::DoNotOptimize(ch.recv(out));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * size));
}

void sizes(benchmark::internal::Benchmark* b) { b->RangeMultiplier(16)->Range(64, 4 << 20); }

}  // namespace

BENCHMARK_CAPTURE(channel_stream, plaintext, ChannelMode::Plaintext)->Apply(sizes)->UseRealTime();
BENCHMARK_CAPTURE(channel_stream, csm, ChannelMode::Csm)->Apply(sizes)->UseRealTime();
BENCHMARK_CAPTURE(channel_stream, aead, ChannelMode::Aead)->Apply(sizes)->UseRealTime();
BENCHMARK_CAPTURE(seal_only, csm, ChannelMode::Csm)->Apply(sizes);
BENCHMARK_CAPTURE(seal_only, aead, ChannelMode::Aead)->Apply(sizes);
