#pragma once

#include <gtest/gtest.h>

#include "lnport/error.hpp"
#include "lnport/market.hpp"

namespace lnport::testing {

// mu = (1.05, 1.15), Sigma = diag(0.01, 0.04): R_GMV = 1.07, V_GMV = 0.008, s = 0.2.
inline MarketParams worked_market() {
  Vector mu(2);
  mu << 1.05, 1.15;
  Matrix sigma(2, 2);
  sigma << 0.01, 0.0, 0.0, 0.04;
  return {mu, sigma};
}

// R_GMV = 1.05, V_GMV = 0.004, s = 0.05: gamma_min < 1, so the log optimum exists.
inline MarketParams log_market() {
  const double d = 0.0141421;
  Vector mu(2);
  mu << 1.05 - d, 1.05 + d;
  Matrix sigma = 0.008 * Matrix::Identity(2, 2);
  return {mu, sigma};
}

// Three correlated assets, vols 5%, 8%, 12%.
inline MarketParams market3() {
  Vector mu(3);
  mu << 1.01, 1.02, 1.035;
  Vector vol(3);
  vol << 0.05, 0.08, 0.12;
  Matrix corr(3, 3);
  corr << 1.0, 0.3, 0.1, 0.3, 1.0, 0.4, 0.1, 0.4, 1.0;
  return {mu, vol.asDiagonal() * corr * vol.asDiagonal()};
}

// R_GMV = -0.04 < 0.
inline MarketParams negative_gmv_market() {
  Vector mu(2);
  mu << -0.1, 0.2;
  Matrix sigma(2, 2);
  sigma << 0.01, 0.0, 0.0, 0.04;
  return {mu, sigma};
}

template <typename F>
void expect_error(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "expected error " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace lnport::testing
