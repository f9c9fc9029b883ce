//! Process-wide record of the discrete divergence defect of every solved field.
//!
//! While at least one [`AuditSession`] is open, each field returned by
//! [`solve_linear`](crate::elliptic::solve_linear) or the semilinear solvers is
//! checked with [`divergence_defect`] and folded into every open session.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::grid::{divergence_defect, Field, Grid};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AuditSummary {
    pub fields: u64,
    /// Largest `defect / (||u|| / h^2)`.
    pub worst_ratio: f64,
    pub worst_defect: f64,
}

impl AuditSummary {
    fn add(&mut self, defect: f64, ratio: f64) {
        self.fields += 1;
        if ratio > self.worst_ratio || ratio.is_nan() {
            self.worst_ratio = ratio;
            self.worst_defect = defect;
        }
    }
}

static OPEN: AtomicUsize = AtomicUsize::new(0);
static SESSIONS: Mutex<Vec<(u64, AuditSummary)>> = Mutex::new(Vec::new());
static NEXT_ID: AtomicUsize = AtomicUsize::new(0);

/// Collects divergence defects until [`finish`](AuditSession::finish) or drop.
#[derive(Debug)]
pub struct AuditSession {
    id: u64,
}

impl AuditSession {
    pub fn start() -> AuditSession {
        let id = NEXT_ID.fetch_add(1, Ordering::Relaxed) as u64;
        SESSIONS.lock().unwrap_or_else(|e| e.into_inner()).push((id, AuditSummary::default()));
        OPEN.fetch_add(1, Ordering::SeqCst);
        AuditSession { id }
    }

    pub fn summary(&self) -> AuditSummary {
        SESSIONS
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .iter()
            .find(|(id, _)| *id == self.id)
            .map(|(_, s)| *s)
            .unwrap_or_default()
    }

    pub fn finish(self) -> AuditSummary {
        self.summary()
    }
}

impl Drop for AuditSession {
    fn drop(&mut self) {
        SESSIONS.lock().unwrap_or_else(|e| e.into_inner()).retain(|(id, _)| *id != self.id);
        OPEN.fetch_sub(1, Ordering::SeqCst);
    }
}

pub(crate) fn observe(grid: &Grid, u: &Field) {
    if OPEN.load(Ordering::SeqCst) == 0 {
        return;
    }
    let Ok((defect, scale)) = divergence_defect(grid, u) else {
        return;
    };
    let ratio = if scale > 0.0 { defect / scale } else { defect };
    for (_, s) in SESSIONS.lock().unwrap_or_else(|e| e.into_inner()).iter_mut() {
        s.add(defect, ratio);
    }
}
