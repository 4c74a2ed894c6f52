// Copyright 2026 The GT-VR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace gtvr {

struct VerifyOptions {
  // Test hook: perturbs one mixing weight before the double stochasticity
  // suite runs, which must then fail.
  bool corrupt_weights = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Property suites on small instances: double stochasticity, spectral gap vs
// a dense SVD, tracking identity, SAGA/SVRG unbiasedness, SAGA table
// consistency, finite-difference gradients and run determinism.
std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options = {});

}  // namespace gtvr
