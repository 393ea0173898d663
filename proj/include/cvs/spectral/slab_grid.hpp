#pragma once

// One half-domain Omega^+ = T^2 x (0,1) or Omega^- = T^2 x (-1,0),
// Fourier in x', Chebyshev-Lobatto collocation in x3. Both endpoints are
// collocation nodes so traces at the interface and the wall are direct reads.

#include <memory>
#include <stdexcept>

#include "cvs/spectral/chebyshev.hpp"
#include "cvs/spectral/torus_grid.hpp"

namespace cvs {

enum class Side { plus, minus };
enum class Wall { interface, top, bottom };

class SlabGrid {
  public:
    SlabGrid() = default;
    SlabGrid(const TorusGrid& torus, int n3, Side side)
        : torus_(torus), n3_(n3), side_(side) {
        if (n3 < 3) throw std::invalid_argument("SlabGrid: n3 must be >= 3");
        auto sh = std::make_shared<Shared>();
        auto t = cheb_nodes(n3);
        sh->x3.resize(n3);
        // plus: x3 = (t+1)/2 in [0,1]; minus: x3 = (t-1)/2 in [-1,0].
        const double off = (side == Side::plus) ? 1.0 : -1.0;
        for (int j = 0; j < n3; ++j) sh->x3[j] = 0.5 * (t[j] + off);
        sh->D = 2.0 * cheb_diff_matrix(n3); // d/dx3 = 2 d/dt
        sh->w = clenshaw_curtis_weights(n3);
        for (auto& wj : sh->w) wj *= 0.5; // slab has length 1/2 of [-1,1]
        shared_ = std::move(sh);
    }

    const TorusGrid& torus() const { return torus_; }
    int n3() const { return n3_; }
    Side side() const { return side_; }
    double x3(int j) const { return shared_->x3[j]; }
    const Eigen::MatrixXd& diff3() const { return shared_->D; }
    const std::vector<double>& weights3() const { return shared_->w; }

    // Level index of a boundary. Nodes run from the upper end (j=0) down.
    int level_of(Wall where) const {
        switch (where) {
            case Wall::interface: return side_ == Side::plus ? n3_ - 1 : 0;
            case Wall::top:
                if (side_ != Side::plus) throw std::invalid_argument("top wall belongs to Omega+");
                return 0;
            case Wall::bottom:
                if (side_ != Side::minus) throw std::invalid_argument("bottom wall belongs to Omega-");
                return n3_ - 1;
        }
        throw std::logic_error("unreachable");
    }

    bool operator==(const SlabGrid& o) const {
        return torus_ == o.torus_ && n3_ == o.n3_ && side_ == o.side_;
    }

  private:
    struct Shared {
        std::vector<double> x3;
        Eigen::MatrixXd D;
        std::vector<double> w;
    };
    TorusGrid torus_;
    int n3_ = 0;
    Side side_ = Side::plus;
    std::shared_ptr<const Shared> shared_;
};

} // namespace cvs
