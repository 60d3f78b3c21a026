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

#include "acfd/acb.hpp"
#include "acfd/anchors.hpp"
#include "acfd/augment.hpp"
#include "acfd/backbone.hpp"
#include "acfd/box.hpp"
#include "acfd/container.hpp"
#include "acfd/conv.hpp"
#include "acfd/eval.hpp"
#include "acfd/head.hpp"
#include "acfd/image.hpp"
#include "acfd/losses.hpp"
#include "acfd/matching.hpp"
#include "acfd/model.hpp"
#include "acfd/neck.hpp"
#include "acfd/pipeline.hpp"
#include "acfd/postprocess.hpp"
#include "acfd/tensor.hpp"
