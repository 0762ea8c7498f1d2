#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oncograph/core/error.hpp"
#include "oncograph/core/tensor.hpp"

namespace oncograph {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
};

/// Define-by-run reverse-mode tape.
///
/// Records are appended in evaluation order, so every operand precedes its
/// consumer and a reverse sweep is a valid topological traversal. A tape is
/// rebuilt for every forward pass. Values live in a deque so references handed
/// out by value() stay valid while more records are appended.
///
/// Sparse operators passed to ops are captured by pointer and must outlive
/// the call to backward().
class Tape {
public:
    /// Called during the reverse sweep with the gradient of the record's output.
    using BackwardFn = std::function<void(Tape&, std::span<const double>)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Records a value that never receives a gradient.
    Var constant(Tensor value) {
        value.clear_grad();
        return push(std::move(value), false, {}, nullptr);
    }

    /// Records a learnable leaf. backward() accumulates into param's grad
    /// slot when param.requires_grad() and the loss depends on it.
    Var parameter(Tensor& param) {
        Var v = push(param.detached(), param.requires_grad(), {}, nullptr);
        records_.back().sink = &param;
        return v;
    }

    /// Records the output of an op. The result needs a gradient iff any input does.
    Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn, std::string_view op) {
        value.check_finite(op);
        bool needs = false;
        for (const Var& in : inputs) {
            check_owned(in);
            needs = needs || records_[in.id].needs_grad;
        }
        return push(std::move(value), needs, std::move(fn), nullptr);
    }

    Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn, std::string_view op) {
        value.check_finite(op);
        bool needs = false;
        for (const Var& in : inputs) {
            check_owned(in);
            needs = needs || records_[in.id].needs_grad;
        }
        return push(std::move(value), needs, std::move(fn), nullptr);
    }

    const Tensor& value(Var v) const {
        check_owned(v);
        return records_[v.id].value;
    }

    bool needs_grad(Var v) const {
        check_owned(v);
        return records_[v.id].needs_grad;
    }

    /// Gradient accumulator for v during backward; empty when v needs no gradient.
    std::span<double> grad_sink(Var v) {
        Record& r = records_[v.id];
        if (!r.needs_grad) return {};
        if (r.grad.empty()) r.grad.assign(r.value.size(), 0.0);
        return r.grad;
    }

    /// Gradient of v computed by the last backward(); empty if v was not reached.
    std::span<const double> grad(Var v) const {
        check_owned(v);
        return records_[v.id].grad;
    }

    std::size_t size() const noexcept { return records_.size(); }

    void backward(Var loss) {
        check_owned(loss);
        if (records_[loss.id].value.size() != 1) {
            throw UsageError("backward() needs a scalar loss, got shape " +
                             shape_string(records_[loss.id].value.shape()));
        }
        for (auto& r : records_) r.grad.clear();
        if (!records_[loss.id].needs_grad) return;
        records_[loss.id].grad.assign(1, 1.0);
        for (std::size_t i = loss.id + 1; i-- > 0;) {
            Record& r = records_[i];
            if (r.grad.empty()) continue;
            if (r.backward) r.backward(*this, r.grad);
            if (r.sink != nullptr) {
                auto g = r.sink->grad_mut();
                for (std::size_t k = 0; k < g.size(); ++k) g[k] += r.grad[k];
            }
        }
    }

private:
    struct Record {
        Tensor value;
        bool needs_grad = false;
        BackwardFn backward;
        Tensor* sink = nullptr;
        std::vector<double> grad;
    };

    Var push(Tensor value, bool needs, BackwardFn fn, Tensor* sink) {
        records_.push_back(Record{std::move(value), needs, needs ? std::move(fn) : BackwardFn{}, sink, {}});
        return Var{this, records_.size() - 1};
    }

    void check_owned(Var v) const {
        if (v.tape != this || v.id >= records_.size()) throw UsageError("variable does not belong to this tape");
    }

    std::deque<Record> records_;
};

inline const Tensor& Var::value() const {
    if (tape == nullptr) throw UsageError("unbound variable");
    return tape->value(*this);
}

} // namespace oncograph
