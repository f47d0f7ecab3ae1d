// Copyright 2026 The otrir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTRIR_WRIGHT_OMEGA_H_
#define OTRIR_WRIGHT_OMEGA_H_

namespace otrir {

// Real Wright omega function: the unique w > 0 with w + log(w) = x.
//
// +inf maps to +inf. For x below about -745 the result underflows to 0,
// which callers clamping at zero can use directly. NaN input throws
// InvalidArgumentError.
double WrightOmega(double x);

// log(WrightOmega(x)), accurate also where WrightOmega underflows.
double LogWrightOmega(double x);

}  // namespace otrir

#endif  // OTRIR_WRIGHT_OMEGA_H_
