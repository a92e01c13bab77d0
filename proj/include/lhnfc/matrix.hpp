#pragma once

namespace lhnfc {

// Non-owning row-major view over a dense sample matrix.
struct ConstMatrixView {
    const double* data = nullptr;
    int rows = 0;
    int cols = 0;

    double operator()(int r, int c) const { return data[static_cast<long>(r) * cols + c]; }
    const double* row(int r) const { return data + static_cast<long>(r) * cols; }
};

}  // namespace lhnfc
