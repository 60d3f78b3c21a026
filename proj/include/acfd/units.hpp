/* Copyright 2026 The ACFD Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <optional>
#include <variant>

#include "acfd/acb.hpp"
#include "acfd/conv.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

/// Analytic multiply-accumulate tally, filled by forward passes when supplied.
struct MacTally {
  std::size_t macs = 0;
};

/// Convolution with an optional trailing batch norm. Folding removes the norm.
template <class T>
struct ConvBnUnit {
  ConvSpec<T> conv;
  std::optional<BNSpec<T>> bn;

  Tensor4<T> forward(const Tensor4<T>& x, MacTally* tally = nullptr) const {
    if (tally) tally->macs += conv_macs(conv, x.shape());
    auto y = conv2d(x, conv);
    return bn ? batch_norm_infer(y, *bn) : y;
  }

  bool fused() const { return !bn.has_value(); }

  void fuse() {
    if (bn) {
      conv = fuse_conv_bn(conv, *bn);
      bn.reset();
    }
  }
};

/// An ACB slot in a network: either the three-branch form or its merge.
template <class T>
struct AcbUnit {
  std::variant<AcbSpec<T>, FusedConv<T>> form;

  Tensor4<T> forward(const Tensor4<T>& x, MacTally* tally = nullptr) const {
    if (const auto* acb = std::get_if<AcbSpec<T>>(&form)) {
      if (tally) tally->macs += acb_macs(*acb, x.shape());
      return acb_forward(x, *acb);
    }
    const auto& f = std::get<FusedConv<T>>(form);
    if (tally) tally->macs += conv_macs(f.conv, x.shape());
    return fused_forward(x, f);
  }

  bool fused() const { return std::holds_alternative<FusedConv<T>>(form); }

  void fuse() {
    if (const auto* acb = std::get_if<AcbSpec<T>>(&form)) form = fuse_acb(*acb);
  }
};

}  // namespace acfd
