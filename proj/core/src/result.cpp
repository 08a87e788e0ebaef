#include "csmsim/result.hpp"

#include <array>
#include <utility>

namespace csmsim {
namespace {

constexpr std::array<std::pair<Error, std::string_view>, 33> kNames{{
    {Error::OutOfRange, "OutOfRange"},
    {Error::BadState, "BadState"},
    {Error::AlreadyExists, "AlreadyExists"},
    {Error::NotEmpty, "NotEmpty"},
    {Error::AlreadyMapped, "AlreadyMapped"},
    {Error::NotDelegated, "NotDelegated"},
    {Error::Unaligned, "Unaligned"},
    {Error::NotMapped, "NotMapped"},
    {Error::TableMiss, "TableMiss"},
    {Error::MissingApt, "MissingApt"},
    {Error::NoSuchRealm, "NoSuchRealm"},
    {Error::Overlap, "Overlap"},
    {Error::NoApt, "NoApt"},
    {Error::NotOwner, "NotOwner"},
    {Error::AlreadyShared, "AlreadyShared"},
    {Error::SelfShare, "SelfShare"},
    {Error::WrongConsumer, "WrongConsumer"},
    {Error::NotShared, "NotShared"},
    {Error::NotReserved, "NotReserved"},
    {Error::SizeMismatch, "SizeMismatch"},
    {Error::AlreadyAttached, "AlreadyAttached"},
    {Error::Unpopulated, "Unpopulated"},
    {Error::NoSuchSharing, "NoSuchSharing"},
    {Error::NoSuchCsm, "NoSuchCsm"},
    {Error::CapacityExceeded, "CapacityExceeded"},
    {Error::NoPendingRsi, "NoPendingRsi"},
    {Error::Fault, "Fault"},
    {Error::VerificationFailed, "VerificationFailed"},
    {Error::OutOfGranules, "OutOfGranules"},
    {Error::PayloadTooLarge, "PayloadTooLarge"},
    {Error::AuthFailure, "AuthFailure"},
    {Error::SeqMismatch, "SeqMismatch"},
    {Error::InvalidArgument, "InvalidArgument"},
}};

}  // namespace

std::string_view to_string(Error e) noexcept {
  for (const auto& [code, name] : kNames) {
    if (code == e) return name;
  }
  return "Unknown";
}

std::optional<Error> error_from_string(std::string_view name) noexcept {
  for (const auto& [code, n] : kNames) {
    if (n == name) return code;
  }
  return std::nullopt;
}

}  // namespace csmsim
