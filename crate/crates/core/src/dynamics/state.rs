use crate::scalar::Real;
use crate::spectral::{Lattice, Projector, QpFunction};
use crate::timestepper::StateVector;
use std::sync::Arc;

macro_rules! pair_state {
    ($(#[$doc:meta])* $name:ident, $a:ident, $b:ident, $pa:expr, $pb:expr, $la:literal, $lb:literal) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name<T: Real> {
            pub $a: QpFunction<T>,
            pub $b: QpFunction<T>,
        }

        impl<T: Real> $name<T> {
            pub fn new($a: QpFunction<T>, $b: QpFunction<T>) -> Self {
                debug_assert!($a.same_lattice(&$b));
                Self { $a, $b }
            }

            pub fn zeros(lattice: &Arc<Lattice<T>>) -> Self {
                Self::new(QpFunction::zeros(lattice), QpFunction::zeros(lattice))
            }

            pub fn lattice(&self) -> &Arc<Lattice<T>> {
                self.$a.lattice()
            }

            /// Projection onto the admissible class.
            pub fn projected(&self) -> Self {
                Self::new(self.$a.project($pa), self.$b.project($pb))
            }

            /// L2 size of the part removed by [`Self::projected`].
            pub fn leakage(&self) -> T {
                let p = self.projected();
                let da = (&self.$a - &p.$a).l2_norm();
                let db = (&self.$b - &p.$b).l2_norm();
                (da * da + db * db).sqrt()
            }

            pub fn embed(&self, target: &Arc<Lattice<T>>) -> crate::Result<Self> {
                Ok(Self::new(self.$a.embed(target)?, self.$b.embed(target)?))
            }

            pub fn band_limit(&self, band: usize) -> Self {
                Self::new(self.$a.band_limit(band), self.$b.band_limit(band))
            }

            pub fn scaled(&self, c: T) -> Self {
                Self::new(self.$a.scale_re(c), self.$b.scale_re(c))
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self::new(&self.$a - &other.$a, &self.$b - &other.$b)
            }

            pub fn add(&self, other: &Self) -> Self {
                Self::new(&self.$a + &other.$a, &self.$b + &other.$b)
            }

            /// `(||first||^2_{H^s} + ||second||^2_{H^{s,1/2}})^{1/2}`.
            pub fn hnorm(&self, s: T) -> T {
                let half = T::lit(0.5);
                (self.$a.norm2(s, T::zero()) + self.$b.norm2(s, half)).sqrt()
            }
        }

        impl<T: Real> StateVector<T> for $name<T> {
            fn axpy(&mut self, a: T, x: &Self) {
                self.$a.axpy(a, &x.$a);
                self.$b.axpy(a, &x.$b);
            }

            fn nonfinite_field(&self) -> Option<&'static str> {
                if !self.$a.is_finite() {
                    Some($la)
                } else if !self.$b.is_finite() {
                    Some($lb)
                } else {
                    None
                }
            }
        }
    };
}

pair_state!(
    /// Differentiated unknowns `(W_alpha, Q_alpha/(1+W_alpha))`, both
    /// holomorphic with zero mean.
    WaveStateDiff, w, r, Projector::PSharp, Projector::PSharp, "W", "R"
);

pair_state!(
    /// Undifferentiated unknowns `(W, Q)` with `W = Z - alpha`.
    WaveStateUndiff, w, q, Projector::PI, Projector::PR, "W", "Q"
);

pair_state!(
    /// Linearized variables `(w, r)`.
    LinState, w, r, Projector::PSharp, Projector::PSharp, "w", "r"
);
