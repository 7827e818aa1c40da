// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace percor {

// Every throwing precondition in the library raises Error with one of these
// codes; conditions a caller is expected to handle by convention (unit depth
// ratio, a zero interpolation parameter) return a defined value instead.
enum class Err {
    PointBehindCamera,
    OutsideVolume,
    DegenerateFrustum,
    DegenerateViewport,
    ParallelNormals,
    DegenerateQuad,
    BehindProjection,
    NonConvergence,
    AnchorOutOfRange,
    CoincidentNodes,
    AffineRow,
    SingularSystem,
    ClassMismatch,
    DegenerateTriangle,
    HorizontalDegeneracy,
    HDegenerate,
    ZeroVector,
    BadMagic,
    TruncatedData,
    ConfigParse,
    MissingTexture,
    UnknownMethod,
};

class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace percor
