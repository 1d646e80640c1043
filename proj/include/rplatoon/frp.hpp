#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

// ============================================================================
//  Arrowized signal-function kernel.
//
//  A SignalFunction<In, Out> is a stream transformer executed one sample at a
//  time: step(dt, input) yields the output sample plus the successor
//  transformer. Values are immutable; stepping never mutates the stepped
//  object, so a SignalFunction can be replayed or forked freely.
//
//  The combinator set is closed: lift_pure, compose, fanout, identity,
//  constant, delay_one, feedback. Feedback loops are broken by a built-in
//  unit delay, so instantaneous cycles cannot be expressed.
// ============================================================================

namespace rplatoon::frp {

class TimeDelta {
 public:
  explicit TimeDelta(double seconds) : seconds_(seconds) {
    if (!std::isfinite(seconds) || seconds < 0.0)
      throw std::invalid_argument("TimeDelta: seconds must be finite and non-negative");
  }
  double seconds() const { return seconds_; }

  friend bool operator==(TimeDelta a, TimeDelta b) { return a.seconds_ == b.seconds_; }

 private:
  double seconds_;
};

namespace detail {

template <class In, class Out>
struct SfImpl {
  using Ptr = std::shared_ptr<const SfImpl>;

  virtual ~SfImpl() = default;
  virtual std::pair<Out, Ptr> step(TimeDelta dt, const In& input) const = 0;
};

}  // namespace detail

template <class In, class Out>
class SignalFunction {
 public:
  using ImplPtr = typename detail::SfImpl<In, Out>::Ptr;

  explicit SignalFunction(ImplPtr impl) : impl_(std::move(impl)) {
    if (!impl_) throw std::invalid_argument("SignalFunction: null impl");
  }

  /// One sampling step. dt must be strictly positive.
  std::pair<Out, SignalFunction> step(TimeDelta dt, const In& input) const {
    if (dt.seconds() <= 0.0)
      throw std::invalid_argument("SignalFunction::step: dt must be > 0");
    auto [output, next] = impl_->step(dt, input);
    return {std::move(output), SignalFunction(std::move(next))};
  }

  const ImplPtr& impl() const { return impl_; }

 private:
  ImplPtr impl_;
};

namespace detail {

template <class In, class Out, class Fn>
struct LiftImpl final : SfImpl<In, Out>,
                        std::enable_shared_from_this<LiftImpl<In, Out, Fn>> {
  Fn fn;

  explicit LiftImpl(Fn f) : fn(std::move(f)) {}

  std::pair<Out, typename SfImpl<In, Out>::Ptr> step(TimeDelta, const In& input) const override {
    return {fn(input), this->shared_from_this()};
  }
};

template <class In, class Out>
struct ConstantImpl final : SfImpl<In, Out>,
                            std::enable_shared_from_this<ConstantImpl<In, Out>> {
  Out value;

  explicit ConstantImpl(Out v) : value(std::move(v)) {}

  std::pair<Out, typename SfImpl<In, Out>::Ptr> step(TimeDelta, const In&) const override {
    return {value, this->shared_from_this()};
  }
};

template <class In, class Mid, class Out>
struct ComposeImpl final : SfImpl<In, Out> {
  typename SfImpl<In, Mid>::Ptr first;
  typename SfImpl<Mid, Out>::Ptr second;

  ComposeImpl(typename SfImpl<In, Mid>::Ptr f, typename SfImpl<Mid, Out>::Ptr s)
      : first(std::move(f)), second(std::move(s)) {}

  std::pair<Out, typename SfImpl<In, Out>::Ptr> step(TimeDelta dt, const In& input) const override {
    auto [mid, first2] = first->step(dt, input);
    auto [out, second2] = second->step(dt, mid);
    return {std::move(out),
            std::make_shared<ComposeImpl>(std::move(first2), std::move(second2))};
  }
};

template <class In, class B, class C>
struct FanoutImpl final : SfImpl<In, std::pair<B, C>> {
  typename SfImpl<In, B>::Ptr left;
  typename SfImpl<In, C>::Ptr right;

  FanoutImpl(typename SfImpl<In, B>::Ptr l, typename SfImpl<In, C>::Ptr r)
      : left(std::move(l)), right(std::move(r)) {}

  std::pair<std::pair<B, C>, typename SfImpl<In, std::pair<B, C>>::Ptr>
  step(TimeDelta dt, const In& input) const override {
    auto [b, left2] = left->step(dt, input);
    auto [c, right2] = right->step(dt, input);
    return {std::pair<B, C>(std::move(b), std::move(c)),
            std::make_shared<FanoutImpl>(std::move(left2), std::move(right2))};
  }
};

// Unit delay: emits the stored sample, stores the current input.
template <class A>
struct DelayImpl final : SfImpl<A, A> {
  A stored;

  explicit DelayImpl(A v) : stored(std::move(v)) {}

  std::pair<A, typename SfImpl<A, A>::Ptr> step(TimeDelta, const A& input) const override {
    return {stored, std::make_shared<DelayImpl>(input)};
  }
};

// Delayed feedback: the body sees the state output of the previous step.
template <class In, class Out, class S>
struct FeedbackImpl final : SfImpl<In, Out> {
  using BodyPtr = typename SfImpl<std::pair<In, S>, std::pair<Out, S>>::Ptr;

  S state;
  BodyPtr body;

  FeedbackImpl(S s, BodyPtr b) : state(std::move(s)), body(std::move(b)) {}

  std::pair<Out, typename SfImpl<In, Out>::Ptr> step(TimeDelta dt, const In& input) const override {
    auto [result, body2] = body->step(dt, std::pair<In, S>(input, state));
    return {std::move(result.first),
            std::make_shared<FeedbackImpl>(std::move(result.second), std::move(body2))};
  }
};

}  // namespace detail

/// Lifts a pure function In -> Out to the signal level.
template <class In, class F,
          class Out = std::decay_t<std::invoke_result_t<const F&, const In&>>>
SignalFunction<In, Out> lift_pure(F fn) {
  return SignalFunction<In, Out>(
      std::make_shared<detail::LiftImpl<In, Out, F>>(std::move(fn)));
}

/// Sequential piping: the first transformer's output feeds the second within
/// the same step.
template <class In, class Mid, class Out>
SignalFunction<In, Out> compose(SignalFunction<In, Mid> first,
                                SignalFunction<Mid, Out> second) {
  return SignalFunction<In, Out>(
      std::make_shared<detail::ComposeImpl<In, Mid, Out>>(first.impl(), second.impl()));
}

/// Both branches receive the same input sample and the same dt.
template <class In, class B, class C>
SignalFunction<In, std::pair<B, C>> fanout(SignalFunction<In, B> left,
                                           SignalFunction<In, C> right) {
  return SignalFunction<In, std::pair<B, C>>(
      std::make_shared<detail::FanoutImpl<In, B, C>>(left.impl(), right.impl()));
}

template <class A>
SignalFunction<A, A> identity() {
  return lift_pure<A>([](const A& a) { return a; });
}

template <class In, class Out>
SignalFunction<In, Out> constant(Out value) {
  return SignalFunction<In, Out>(
      std::make_shared<detail::ConstantImpl<In, Out>>(std::move(value)));
}

/// Emits `initial` first, then each input one step late.
template <class A>
SignalFunction<A, A> delay_one(A initial) {
  return SignalFunction<A, A>(
      std::make_shared<detail::DelayImpl<A>>(std::move(initial)));
}

/// Runs `body` with a state channel threaded through a built-in unit delay:
/// at step 0 the body's state input is `initial`, at step n it is the body's
/// state output from step n-1.
template <class In, class Out, class S>
SignalFunction<In, Out> feedback(S initial,
                                 SignalFunction<std::pair<In, S>, std::pair<Out, S>> body) {
  return SignalFunction<In, Out>(
      std::make_shared<detail::FeedbackImpl<In, Out, S>>(std::move(initial), body.impl()));
}

template <class A>
struct Sample {
  TimeDelta dt;
  A value;
};

template <class A>
using SampleStream = std::vector<Sample<A>>;

template <class A>
SampleStream<A> uniform_stream(double dt_seconds, std::vector<A> values) {
  SampleStream<A> stream;
  stream.reserve(values.size());
  for (auto& v : values) stream.push_back({TimeDelta(dt_seconds), std::move(v)});
  return stream;
}

/// Folds step over a finite stream; output length equals input length.
template <class In, class Out>
std::vector<Out> run(SignalFunction<In, Out> sf, const SampleStream<In>& stream) {
  std::vector<Out> outputs;
  outputs.reserve(stream.size());
  for (const auto& sample : stream) {
    auto [output, next] = sf.step(sample.dt, sample.value);
    outputs.push_back(std::move(output));
    sf = std::move(next);
  }
  return outputs;
}

}  // namespace rplatoon::frp
