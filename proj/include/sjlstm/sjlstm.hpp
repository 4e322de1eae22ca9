// Copyright 2026 The sjlstm Authors.
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

#ifndef SJLSTM_SJLSTM_HPP_
#define SJLSTM_SJLSTM_HPP_

#include "sjlstm/app.hpp"
#include "sjlstm/baseline.hpp"
#include "sjlstm/checkpoint.hpp"
#include "sjlstm/corpus.hpp"
#include "sjlstm/evaluation.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/numeric.hpp"
#include "sjlstm/status.hpp"
#include "sjlstm/synth.hpp"
#include "sjlstm/text_structure.hpp"
#include "sjlstm/training.hpp"

#endif  // SJLSTM_SJLSTM_HPP_
