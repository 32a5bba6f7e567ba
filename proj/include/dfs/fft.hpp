#pragma once
#include <complex>
#include <unsupported/Eigen/FFT>

#include "dfs/image.hpp"

namespace dfs {

template <class S>
using ComplexMat = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, Eigen::Dynamic>;

// Smallest 5-smooth integer >= n (fast sizes for the mixed-radix FFT).
inline int next_smooth(int n) {
  if (n < 1) return 1;
  for (;; ++n) {
    int m = n;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

// 2-D DFT via 1-D passes over columns then rows. Eigen's FFT caches plans
// per length inside the local object, so both passes reuse one plan each.
template <class S>
ComplexMat<S> fft2(const ComplexMat<S>& in) {
  using CVec = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, 1>;
  ComplexMat<S> m = in;
  Eigen::FFT<S> fft;
  CVec buf_in(m.rows()), buf_out(m.rows());
  for (int c = 0; c < m.cols(); ++c) {
    buf_in = m.col(c);
    fft.fwd(buf_out, buf_in);
    m.col(c) = buf_out;
  }
  CVec rin(m.cols()), rout(m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    rin = m.row(r).transpose();
    fft.fwd(rout, rin);
    m.row(r) = rout.transpose();
  }
  return m;
}

template <class S>
ComplexMat<S> fft2(const Plane<S>& in) {
  return fft2(ComplexMat<S>(in.matrix().template cast<std::complex<S>>()));
}

// Inverse 2-D DFT (scaled by 1/(rows*cols)); the real part is returned.
template <class S>
Plane<S> ifft2_real(const ComplexMat<S>& in) {
  using CVec = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, 1>;
  ComplexMat<S> m = in;
  Eigen::FFT<S> fft;
  CVec buf_in(m.rows()), buf_out(m.rows());
  for (int c = 0; c < m.cols(); ++c) {
    buf_in = m.col(c);
    fft.inv(buf_out, buf_in);
    m.col(c) = buf_out;
  }
  CVec rin(m.cols()), rout(m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    rin = m.row(r).transpose();
    fft.inv(rout, rin);
    m.row(r) = rout.transpose();
  }
  return m.real().array();
}

// Embed a (2R+1)-sided kernel into a rows×cols plane with its center at the
// origin, wrapped periodically — the spatial layout whose DFT is the
// kernel's transfer function.
template <class S>
Plane<S> embed_kernel(const Plane<S>& k, int rows, int cols) {
  const int R = int(k.rows()) / 2;
  if (k.rows() > rows || k.cols() > cols)
    throw std::invalid_argument("embed_kernel: kernel larger than tile");
  Plane<S> out = Plane<S>::Zero(rows, cols);
  for (int dy = -R; dy <= R; ++dy)
    for (int dx = -R; dx <= R; ++dx)
      out((dy % rows + rows) % rows, (dx % cols + cols) % cols) += k(dy + R, dx + R);
  return out;
}

}  // namespace dfs
