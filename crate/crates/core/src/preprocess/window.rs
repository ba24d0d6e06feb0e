use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::signal_io::{Epoch, GroupLabel, StageTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowPlan {
    pub width: usize,
    pub step: usize,
}

impl Default for WindowPlan {
    fn default() -> Self {
        WindowPlan { width: 500, step: 250 }
    }
}

impl WindowPlan {
    pub fn validate(&self) -> Result<()> {
        if self.step == 0 || self.step > self.width {
            return Err(Error::InvalidArgument(format!(
                "window plan needs 0 < step <= width, got step {} width {}",
                self.step, self.width
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window<T> {
    pub data: Matrix<T>,
    pub stage: StageTag,
    pub group: GroupLabel,
    pub offset: usize,
}

/// Offsets 0, step, 2·step, … with `offset + width <= len`.
pub fn window_offsets(len: usize, plan: &WindowPlan) -> Result<Vec<usize>> {
    plan.validate()?;
    if len < plan.width {
        return Err(Error::InvalidArgument(format!(
            "epoch of {len} samples is shorter than window width {}",
            plan.width
        )));
    }
    Ok((0..=(len - plan.width) / plan.step).map(|i| i * plan.step).collect())
}

pub fn slide_windows<T: Real>(epoch: &Epoch<T>, plan: &WindowPlan) -> Result<Vec<Window<T>>> {
    Ok(window_offsets(epoch.len(), plan)?
        .into_iter()
        .map(|offset| Window {
            data: epoch.data.col_slice(offset, plan.width),
            stage: epoch.stage,
            group: epoch.group,
            offset,
        })
        .collect())
}
