use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::chain_graph::ChainSetApprox;
use crate::homoclinic::Interval;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Family table or domain rejected at construction.
    Construction(String),
    /// `d1` vanishes identically; the map is constant on an interval.
    FlatInterval,
    NoBirthBracketed,
    /// Operation requires a repelling orbit.
    NotRepelling,
    BranchNotStabilized {
        left: Option<Interval>,
        right: Option<Interval>,
    },
    DegenerateTangency,
    NoHomoclinicOrbit,
    /// Refinement would exceed the box cap; carries the last approximation.
    MemoryCap(Box<ChainSetApprox>),
    NeedProfiles,
    /// Limit-set iteration did not settle within the iterate cap.
    NotStabilized,
    EscapedDomain,
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Construction(msg) => write!(f, "invalid family: {msg}"),
            Error::FlatInterval => write!(f, "derivative vanishes on an interval (map is locally constant)"),
            Error::NoBirthBracketed => write!(f, "no birth event bracketed"),
            Error::NotRepelling => write!(f, "orbit is not repelling"),
            Error::BranchNotStabilized { .. } => write!(f, "branch not stabilized"),
            Error::DegenerateTangency => write!(f, "degenerate tangency"),
            Error::NoHomoclinicOrbit => write!(f, "no homoclinic orbit through w"),
            Error::MemoryCap(a) => write!(
                f,
                "refinement exceeds box cap (stopped at {} boxes)",
                a.partition.n_boxes
            ),
            Error::NeedProfiles => write!(f, "need >= 3 profiles"),
            Error::NotStabilized => write!(f, "limit set did not stabilize"),
            Error::EscapedDomain => write!(f, "orbit escaped the domain"),
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for Error {}
