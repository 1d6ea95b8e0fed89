//! Waveguide neural operator.
