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

#ifndef SJLSTM_BASELINE_HPP_
#define SJLSTM_BASELINE_HPP_

// Standalone full-read LSTM classifier: every token is fed to the cell, no
// agents are consulted. Shares the parameter layout of the speed reader so
// the two can be compared on identical weights.

#include <span>
#include <vector>

#include "sjlstm/corpus.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/numeric.hpp"

namespace sjlstm {

struct FullReadResult {
  Vector final_hidden;
  std::vector<double> prediction;
};

inline FullReadResult full_read_forward(const Document& doc, const ModelParams& params,
                                        std::vector<LstmCache>* caches = nullptr) {
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);
  Vector h = Vector::Zero(d);
  Vector c = Vector::Zero(d);
  if (caches != nullptr) caches->assign(doc.tokens.size(), LstmCache{});
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    LstmState s = lstm_step(h, c, embed(doc.tokens[t], params), params,
                            caches ? &(*caches)[t] : nullptr);
    h = std::move(s.h);
    c = std::move(s.c);
  }
  FullReadResult r;
  r.prediction = classify(h, params);
  r.final_hidden = std::move(h);
  return r;
}

// Accumulates scale * d(ce_weight * CE)/dtheta by plain BPTT; returns CE.
inline double full_read_gradient(const Document& doc, ModelParams& params,
                                 double ce_weight, double scale) {
  std::vector<LstmCache> caches;
  FullReadResult r = full_read_forward(doc, params, &caches);
  const double ce = cross_entropy(r.prediction, doc.label_id);

  Vector dz = cross_entropy_logit_grad(r.prediction, doc.label_id) * (ce_weight * scale);
  params.grad(Slot::kClassifierWeight).matrix().noalias() += dz * r.final_hidden.transpose();
  params.grad(Slot::kClassifierBias).vector() += dz;
  Vector dh = params.value(Slot::kClassifierWeight).matrix().transpose() * dz;
  Vector dc = Vector::Zero(static_cast<Eigen::Index>(params.dims().hidden));
  for (std::size_t t = doc.tokens.size(); t-- > 0;) {
    LstmGrad g = lstm_backward(caches[t], dh, dc, params);
    params.grad(Slot::kEmbedding).row(doc.tokens[t].vocab_id) += g.dx;
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
  return ce;
}

// Mean-batch gradient of the baseline objective, left in the grad buffers.
inline double full_read_batch_gradient(const std::vector<Document>& corpus,
                                       std::span<const std::size_t> batch,
                                       ModelParams& params, double ce_weight = 1.0) {
  params.store().zero_grad();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i : batch) {
    loss += ce_weight * full_read_gradient(corpus[i], params, ce_weight, scale);
  }
  return loss * scale;
}

inline double full_read_accuracy(const std::vector<Document>& corpus,
                                 const ModelParams& params) {
  if (corpus.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& doc : corpus) {
    correct += argmax(full_read_forward(doc, params).prediction) == doc.label_id;
  }
  return static_cast<double>(correct) / static_cast<double>(corpus.size());
}

}  // namespace sjlstm

#endif  // SJLSTM_BASELINE_HPP_
