#pragma once

// Bit layout of every 256-bit record. docs/word_format.md mirrors this file.
//
// Common header (all record types)
//   [253, 255]  record type
//   [250, 252]  channel
//   [249]       broadcast (gate-sequence records: deliver to every channel)
//
// Spline data (type 0) and PLUT programming (type 1)
//   [  0,  39]  u0            [ 40,  79]  u1
//   [ 80, 119]  u2            [120, 159]  u3
//   [160, 199]  duration (cycles, >= 1)
//   [200, 202]  parameter     [203]       wait for trigger
//   [204]       sync pulse    [205]       feed-forward enable
//   [206]       frame apply   [207]       frame invert
//   [208]       hold (NOP: keep the previous output for `duration` cycles)
//   [209, 212]  coefficient shift s (u_k is in units of 2^-(k*s) LSB)
//   [213, 222]  PLUT address (type 1 only, zero otherwise)
//   [223, 248]  reserved, zero
//
// MLUT programming (type 2)
//   [  0, 199]  up to 20 PLUT addresses, 10 bits each, entry i at 10*i
//   [200, 211]  first MLUT address
//   [212, 216]  entry count (1..20)
//
// GLUT programming (type 3)
//   [  0, 179]  up to 6 entries of 30 bits at 30*i:
//               [0, 5] gate id, [6, 17] MLUT start, [18, 29] MLUT stop (inclusive)
//   [200, 202]  entry count (1..6)
//
// Gate sequence (type 4)
//   [  0, 215]  up to 36 gate ids, 6 bits each, id i at 6*i
//   [216, 221]  id count (1..36)
//
// NOP transfer (type 7): carries no payload; pads the serial DMA link.

#include <cstddef>
#include <cstdint>

namespace rfseq::format {

enum class RecordType : std::uint8_t {
    SplineData = 0,
    PlutProgram = 1,
    MlutProgram = 2,
    GlutProgram = 3,
    GateSequence = 4,
    Nop = 7,
};

inline constexpr unsigned kTypeLo = 253, kTypeBits = 3;
inline constexpr unsigned kChannelLo = 250, kChannelBits = 3;
inline constexpr unsigned kBroadcastBit = 249;

inline constexpr unsigned kCoeffLo = 0;  // u_k at 40*k
inline constexpr unsigned kDurationLo = 160;
inline constexpr unsigned kParamLo = 200, kParamBits = 3;
inline constexpr unsigned kWaitTriggerBit = 203;
inline constexpr unsigned kSyncBit = 204;
inline constexpr unsigned kFeedforwardBit = 205;
inline constexpr unsigned kFrameApplyBit = 206;
inline constexpr unsigned kFrameInvertBit = 207;
inline constexpr unsigned kHoldBit = 208;
inline constexpr unsigned kShiftLo = 209, kShiftBits = 4;
inline constexpr unsigned kPlutAddrLo = 213, kPlutAddrBits = 10;
inline constexpr unsigned kSplineReservedLo = 223, kSplineReservedHi = 248;

inline constexpr unsigned kMlutEntryBits = 10, kMlutMaxEntries = 20;
inline constexpr unsigned kMlutBaseLo = 200, kMlutBaseBits = 12;
inline constexpr unsigned kMlutCountLo = 212, kMlutCountBits = 5;

inline constexpr unsigned kGlutEntryBits = 30, kGlutMaxEntries = 6;
inline constexpr unsigned kGlutCountLo = 200, kGlutCountBits = 3;

inline constexpr unsigned kGateIdBits = 6, kGateIdsPerWord = 36;
inline constexpr unsigned kSeqCountLo = 216, kSeqCountBits = 6;

// LUT depths.
inline constexpr std::size_t kPlutDepth = std::size_t(1) << 10;
inline constexpr std::size_t kMlutDepth = std::size_t(1) << 12;
inline constexpr std::size_t kGlutDepth = std::size_t(1) << 6;

}  // namespace rfseq::format
