// Copyright (c) the freqid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "freqid/decompose.hpp"
#include "freqid/error.hpp"
#include "freqid/fourier.hpp"
#include "freqid/gaussian.hpp"
#include "freqid/gradients.hpp"
#include "freqid/image.hpp"
#include "freqid/image_io.hpp"
#include "freqid/losses.hpp"
#include "freqid/mask.hpp"
#include "freqid/metrics.hpp"
#include "freqid/serialize.hpp"
#include "freqid/spectrum_file.hpp"
