#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rplatoon/geometry.hpp"
#include "rplatoon/scrc_types.hpp"

// ============================================================================
//  Inter-vehicle broadcast bus.
//
//  Every vehicle owns one write channel; all peers read it. Delivery has
//  exactly one step of latency: a message published at step t is visible to
//  every peer's snapshot at step t+1 and expires after that step unless
//  republished. The two-phase current/visible buffer keeps reads and writes
//  race-free within a step: publish() touches only the owner's current slot,
//  snapshot() reads only visible slots, and advance() is the single exclusive
//  operation between steps.
// ============================================================================

namespace rplatoon {

class MessageBus {
 public:
  virtual ~MessageBus() = default;

  virtual int size() const = 0;

  /// Writes the owner's channel for this step; a later publish by the same
  /// owner within the step overwrites.
  virtual void publish(int vehicle_id, const Message& msg) = 0;

  /// Last step's messages from every vehicle except the reader, ascending id.
  virtual std::vector<CommEntry> snapshot(int vehicle_id) const = 0;

  /// Step barrier: visible := current, current := empty. Requires exclusive
  /// access.
  virtual void advance() = 0;

  /// Vehicle positions for range-limited decorators; base buses ignore them.
  virtual void set_positions(std::span<const Vec2>) {}
};

class PlatoonBus final : public MessageBus {
 public:
  explicit PlatoonBus(int vehicle_count) {
    if (vehicle_count < 1)
      throw std::invalid_argument("PlatoonBus: need at least one vehicle");
    current_.resize(static_cast<std::size_t>(vehicle_count));
    visible_.resize(static_cast<std::size_t>(vehicle_count));
  }

  int size() const override { return static_cast<int>(current_.size()); }

  void publish(int vehicle_id, const Message& msg) override {
    check_id(vehicle_id);
    current_[static_cast<std::size_t>(vehicle_id)] = sanitize_message(msg);
  }

  std::vector<CommEntry> snapshot(int vehicle_id) const override {
    check_id(vehicle_id);
    std::vector<CommEntry> out;
    out.reserve(visible_.size() - 1);
    for (std::size_t j = 0; j < visible_.size(); ++j)
      if (static_cast<int>(j) != vehicle_id)
        out.push_back({static_cast<int>(j), visible_[j]});
    return out;
  }

  void advance() override {
    visible_ = current_;
    for (auto& m : current_) m.clear();
  }

 private:
  void check_id(int id) const {
    if (id < 0 || id >= size())
      throw std::invalid_argument("bus: unknown vehicle id");
  }

  std::vector<Message> current_;
  std::vector<Message> visible_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Decorator simulating unreliable or range-limited communication. Each
/// (sender, receiver, step) delivery is dropped independently with the given
/// probability, decided by a counter-based hash of the seed, so runs are
/// reproducible bit-for-bit no matter the call order. When a range limit is
/// set, deliveries between vehicles farther apart (by the positions registered
/// for the step) are dropped as well.
class LossyBus final : public MessageBus {
 public:
  LossyBus(std::unique_ptr<MessageBus> inner, double drop_probability,
           std::optional<double> range_limit, std::uint64_t seed)
      : inner_(std::move(inner)),
        drop_(drop_probability),
        range_limit_(range_limit),
        seed_(seed) {
    if (!inner_) throw std::invalid_argument("LossyBus: null inner bus");
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
      throw std::invalid_argument("LossyBus: drop probability must be in [0,1]");
  }

  int size() const override { return inner_->size(); }

  void publish(int vehicle_id, const Message& msg) override {
    inner_->publish(vehicle_id, msg);
  }

  std::vector<CommEntry> snapshot(int vehicle_id) const override {
    auto entries = inner_->snapshot(vehicle_id);
    for (auto& entry : entries) {
      if (entry.text.empty()) continue;
      if (out_of_range(vehicle_id, entry.vehicle_id) ||
          (drop_ > 0.0 && delivery_roll(entry.vehicle_id, vehicle_id) < drop_))
        entry.text.clear();
    }
    return entries;
  }

  void advance() override {
    ++step_;
    inner_->advance();
  }

  void set_positions(std::span<const Vec2> positions) override {
    positions_.assign(positions.begin(), positions.end());
    inner_->set_positions(positions);
  }

 private:
  bool out_of_range(int receiver, int sender) const {
    if (!range_limit_) return false;
    auto r = static_cast<std::size_t>(receiver);
    auto s = static_cast<std::size_t>(sender);
    if (r >= positions_.size() || s >= positions_.size()) return false;
    return norm(positions_[r] - positions_[s]) > *range_limit_;
  }

  double delivery_roll(int sender, int receiver) const {
    using detail::splitmix64;
    std::uint64_t h = splitmix64(seed_ ^ splitmix64(step_));
    h = splitmix64(h ^ static_cast<std::uint64_t>(sender));
    h = splitmix64(h ^ static_cast<std::uint64_t>(receiver));
    return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
  }

  std::unique_ptr<MessageBus> inner_;
  double drop_;
  std::optional<double> range_limit_;
  std::uint64_t seed_;
  std::uint64_t step_ = 0;
  std::vector<Vec2> positions_;
};

inline std::unique_ptr<MessageBus> lossy_wrap(std::unique_ptr<MessageBus> bus,
                                              double drop_probability,
                                              std::optional<double> range_limit,
                                              std::uint64_t seed) {
  return std::make_unique<LossyBus>(std::move(bus), drop_probability, range_limit, seed);
}

}  // namespace rplatoon
