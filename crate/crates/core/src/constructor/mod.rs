//! Closed-form network constructions.

mod operator;
mod polynet;

pub use operator::{
    build_dno, build_dno_with, build_univariate, make_nodes, node_coordinate, sample_points, DnoForm, DnoOperator,
    UnivariateOperator, BELL_WINDOW,
};
pub use polynet::{
    check_accuracy, construct_poly_net, default_expansion_point, norm_net, precision_for, product_gate, square_net,
    PolyNetSpec, CONDITIONING_FLOOR, EXTENDED_PRECISION_BELOW,
};
