pub mod build_pack;
pub mod eval;
pub mod impact;
pub mod matching;
pub mod significance;
pub mod walks;

use bkmatch_core::eval::{ExactTail, ZeroDivision};
use clap::ValueEnum;

/// Value of P or R when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroDivisionArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

impl From<ZeroDivisionArg> for ZeroDivision {
    fn from(z: ZeroDivisionArg) -> Self {
        match z {
            ZeroDivisionArg::Zero => ZeroDivision::Zero,
            ZeroDivisionArg::One => ZeroDivision::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactTailArg {
    /// Upper binomial tail from n01.
    OneSided,
    /// Twice the upper tail, capped at 1.
    Doubled,
}

impl From<ExactTailArg> for ExactTail {
    fn from(t: ExactTailArg) -> Self {
        match t {
            ExactTailArg::OneSided => ExactTail::OneSided,
            ExactTailArg::Doubled => ExactTail::Doubled,
        }
    }
}

pub fn check_alpha(alpha: f64) -> Result<(), crate::error::CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(crate::error::CliError::Config(format!("--alpha {alpha} outside (0, 1)")))
    }
}
