#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <variant>

namespace csmsim {

// Status codes shared by every RMI/RSI handler, the host model and the
// communication channel. Names are stable: they appear in scenario files.
enum class Error {
  OutOfRange,
  BadState,
  AlreadyExists,
  NotEmpty,
  AlreadyMapped,
  NotDelegated,
  Unaligned,
  NotMapped,
  TableMiss,
  MissingApt,
  NoSuchRealm,
  Overlap,
  NoApt,
  NotOwner,
  AlreadyShared,
  SelfShare,
  WrongConsumer,
  NotShared,
  NotReserved,
  SizeMismatch,
  AlreadyAttached,
  Unpopulated,
  NoSuchSharing,
  NoSuchCsm,
  CapacityExceeded,
  NoPendingRsi,
  Fault,
  VerificationFailed,
  OutOfGranules,
  PayloadTooLarge,
  AuthFailure,
  SeqMismatch,
  InvalidArgument,
};

std::string_view to_string(Error e) noexcept;
std::optional<Error> error_from_string(std::string_view name) noexcept;

// Minimal value-or-error carrier. T must not be E.
template <class T, class E>
class [[nodiscard]] Expected {
 public:
  Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  T& value() & { return std::get<0>(v_); }
  const T& value() const& { return std::get<0>(v_); }
  T&& value() && { return std::get<0>(std::move(v_)); }
  const E& error() const { return std::get<1>(v_); }

  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }
  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }

 private:
  std::variant<T, E> v_;
};

template <class E>
class [[nodiscard]] Expected<void, E> {
 public:
  Expected() = default;
  Expected(E error) : error_(std::move(error)) {}

  bool ok() const noexcept { return !error_.has_value(); }
  explicit operator bool() const noexcept { return ok(); }
  const E& error() const { return *error_; }

 private:
  std::optional<E> error_;
};

template <class T>
using Result = Expected<T, Error>;

}  // namespace csmsim
