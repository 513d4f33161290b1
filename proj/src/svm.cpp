#include <algorithm>
#include <cmath>

#include "efsis/error.hpp"
#include "efsis/eval.hpp"

namespace efsis {

LinearModel train_linear_svm(const LabeledMatrix& train, const SvmOptions& options)
{
    if (!(options.C > 0.0) || !std::isfinite(options.C)) {
        throw Error("SVM regularization C must be positive");
    }
    if (train.count_positive() == 0 || train.count_negative() == 0) {
        throw Error("SVM training needs samples of both classes");
    }
    for (double v : train.values()) {
        if (!std::isfinite(v)) {
            throw Error("SVM training data contains non-finite values");
        }
    }
    const std::size_t p = train.rows();
    const std::size_t d = train.cols();
    const double upper = options.C;

    std::vector<double> diag(p);
    for (std::size_t i = 0; i < p; ++i) {
        double s = 1.0; // augmented bias feature
        for (double v : train.row(i)) {
            s += v * v;
        }
        diag[i] = s;
    }

    LinearModel model;
    model.C = options.C;
    model.weights.assign(d, 0.0);
    std::vector<double> alpha(p, 0.0);
    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        double max_update = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double y = train.positive(i) ? 1.0 : -1.0;
            auto x = train.row(i);
            double margin = model.bias;
            for (std::size_t f = 0; f < d; ++f) {
                margin += model.weights[f] * x[f];
            }
            const double grad = y * margin - 1.0;
            double projected = grad;
            if (alpha[i] == 0.0) {
                projected = std::min(grad, 0.0);
            } else if (alpha[i] == upper) {
                projected = std::max(grad, 0.0);
            }
            if (projected == 0.0) {
                continue;
            }
            const double old = alpha[i];
            alpha[i] = std::clamp(old - grad / diag[i], 0.0, upper);
            const double step = (alpha[i] - old) * y;
            for (std::size_t f = 0; f < d; ++f) {
                model.weights[f] += step * x[f];
            }
            model.bias += step;
            max_update = std::max(max_update, std::abs(alpha[i] - old));
        }
        if (max_update < options.tolerance) {
            break;
        }
    }
    return model;
}

std::vector<double> decision_values(const LinearModel& model, const LabeledMatrix& samples)
{
    if (samples.cols() != model.weights.size()) {
        throw Error("decision_values: model has " + std::to_string(model.weights.size())
                    + " weights but samples have " + std::to_string(samples.cols())
                    + " features");
    }
    std::vector<double> out(samples.rows());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        double s = model.bias;
        auto x = samples.row(r);
        for (std::size_t f = 0; f < x.size(); ++f) {
            s += model.weights[f] * x[f];
        }
        out[r] = s;
    }
    return out;
}

} // namespace efsis
