#pragma once

// Chebyshev-Lobatto collocation on [-1,1]: nodes, differentiation matrix
// (Trefethen's cheb) and Clenshaw-Curtis quadrature weights.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace cvs {

// Nodes t_j = cos(j pi / (n-1)), j = 0..n-1, descending from +1 to -1.
inline std::vector<double> cheb_nodes(int n) {
    std::vector<double> t(n);
    const int N = n - 1;
    for (int j = 0; j < n; ++j) t[j] = std::cos(M_PI * j / N);
    t[0] = 1.0;
    t[N] = -1.0;
    if (N % 2 == 0) t[N / 2] = 0.0;
    return t;
}

inline Eigen::MatrixXd cheb_diff_matrix(int n) {
    const int N = n - 1;
    auto t = cheb_nodes(n);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    auto c = [&](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double sign = ((i + j) % 2) ? -1.0 : 1.0;
            D(i, j) = (c(i) / c(j)) * sign / (t[i] - t[j]);
        }
    }
    for (int i = 0; i < n; ++i) D(i, i) = -D.row(i).sum();
    return D;
}

// Clenshaw-Curtis weights on the Lobatto nodes; integrates polynomials of
// degree <= n-1 exactly over [-1,1].
inline std::vector<double> clenshaw_curtis_weights(int n) {
    const int N = n - 1;
    std::vector<double> w(n, 0.0);
    if (N == 0) {
        w[0] = 2.0;
        return w;
    }
    std::vector<double> theta(n);
    for (int j = 0; j < n; ++j) theta[j] = M_PI * j / N;
    std::vector<double> v(N - 1, 1.0);
    if (N % 2 == 0) {
        w[0] = w[N] = 1.0 / (N * N - 1);
        for (int k = 1; k <= N / 2 - 1; ++k)
            for (int i = 1; i < N; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1);
        for (int i = 1; i < N; ++i) v[i - 1] -= std::cos(N * theta[i]) / (N * N - 1);
    } else {
        w[0] = w[N] = 1.0 / (N * N);
        for (int k = 1; k <= (N - 1) / 2; ++k)
            for (int i = 1; i < N; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1);
    }
    for (int i = 1; i < N; ++i) w[i] = 2.0 * v[i - 1] / N;
    return w;
}

} // namespace cvs
