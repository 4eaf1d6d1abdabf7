use super::decompose::{check_kernels, decompose_series};
use super::ltrsf::{LTrsfCache, LTrsfModel};
use super::pattn::{PatchCache, PatchModel};
use crate::error::{Error, Result};
use crate::nnkernel::{join, Parameter, Parameterized, Tensor2};

#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    Patch(PatchModel),
    LTrsf(LTrsfModel),
}

#[derive(Debug, Clone)]
pub enum BranchCache {
    Patch(PatchCache),
    LTrsf(LTrsfCache),
}

impl Branch {
    fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, BranchCache)> {
        match self {
            Branch::Patch(m) => m.forward(windows).map(|(y, c)| (y, BranchCache::Patch(c))),
            Branch::LTrsf(m) => m.forward(windows).map(|(y, c)| (y, BranchCache::LTrsf(c))),
        }
    }

    fn backward(&mut self, cache: &BranchCache, grads: &[Tensor2]) -> Result<()> {
        match (self, cache) {
            (Branch::Patch(m), BranchCache::Patch(c)) => m.backward(c, grads),
            (Branch::LTrsf(m), BranchCache::LTrsf(c)) => m.backward(c, grads),
            _ => unreachable!("cache produced by a different branch type"),
        }
    }
}

impl Parameterized for Branch {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        match self {
            Branch::Patch(m) => m.visit_params(prefix, f),
            Branch::LTrsf(m) => m.visit_params(prefix, f),
        }
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        match self {
            Branch::Patch(m) => m.visit_params_mut(prefix, f),
            Branch::LTrsf(m) => m.visit_params_mut(prefix, f),
        }
    }
}

const COMPONENTS: [&str; 3] = ["trend", "seasonal", "residual"];

/// Forecasts trend, seasonal and residual components with separate
/// sub-models and mixes them with three learnable weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedModel {
    pub k_trend: usize,
    pub k_seasonal: usize,
    pub branches: [Branch; 3],
    /// `1 x 3` mixing weights in trend, seasonal, residual order.
    pub mix: Parameter,
}

#[derive(Debug, Clone)]
pub struct DecomposedCache {
    outputs: [Vec<Tensor2>; 3],
    caches: [BranchCache; 3],
}

impl DecomposedModel {
    pub fn new(k_trend: usize, k_seasonal: usize, branches: [Branch; 3]) -> Result<Self> {
        check_kernels(k_trend, k_seasonal)?;
        Ok(Self {
            k_trend,
            k_seasonal,
            branches,
            mix: Parameter::new(Tensor2::filled(1, 3, 1.0 / 3.0)),
        })
    }

    pub fn set_mix(&mut self, weights: [f64; 3]) {
        self.mix.value.as_mut_slice().copy_from_slice(&weights);
    }

    fn components(&self, windows: &[Tensor2]) -> Result<[Vec<Tensor2>; 3]> {
        let mut parts: [Vec<Tensor2>; 3] = Default::default();
        for w in windows {
            let d = decompose_series(w, self.k_trend, self.k_seasonal)?;
            parts[0].push(d.trend);
            parts[1].push(d.seasonal);
            parts[2].push(d.residual);
        }
        Ok(parts)
    }

    /// Forecast of one branch on its own component, before mixing.
    pub fn branch_forecast(&self, branch: usize, windows: &[Tensor2]) -> Result<Vec<Tensor2>> {
        let parts = self.components(windows)?;
        Ok(self.branches[branch].forward(&parts[branch])?.0)
    }

    pub fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, DecomposedCache)> {
        if windows.is_empty() {
            return Err(Error::Data("empty window batch".into()));
        }
        let parts = self.components(windows)?;
        let (o0, c0) = self.branches[0].forward(&parts[0])?;
        let (o1, c1) = self.branches[1].forward(&parts[1])?;
        let (o2, c2) = self.branches[2].forward(&parts[2])?;
        let w = self.mix.value.as_slice();
        let mut out = Vec::with_capacity(windows.len());
        for b in 0..windows.len() {
            let mut y = o0[b].scale(w[0]);
            y.add_assign(&o1[b].scale(w[1]))?;
            y.add_assign(&o2[b].scale(w[2]))?;
            out.push(y);
        }
        Ok((
            out,
            DecomposedCache {
                outputs: [o0, o1, o2],
                caches: [c0, c1, c2],
            },
        ))
    }

    pub fn backward(&mut self, cache: &DecomposedCache, grads: &[Tensor2]) -> Result<()> {
        let w: Vec<f64> = self.mix.value.as_slice().to_vec();
        for i in 0..3 {
            let mut dmix = 0.0;
            let mut branch_grads = Vec::with_capacity(grads.len());
            for (g, y) in grads.iter().zip(&cache.outputs[i]) {
                dmix += g.mul_elem(y)?.sum();
                branch_grads.push(g.scale(w[i]));
            }
            self.mix.grad.as_mut_slice()[i] += dmix;
            self.branches[i].backward(&cache.caches[i], &branch_grads)?;
        }
        Ok(())
    }
}

impl Parameterized for DecomposedModel {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        for (b, name) in self.branches.iter().zip(COMPONENTS) {
            b.visit_params(&join(prefix, name), f);
        }
        f(join(prefix, "mix"), &self.mix);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        for (b, name) in self.branches.iter_mut().zip(COMPONENTS) {
            b.visit_params_mut(&join(prefix, name), f);
        }
        f(join(prefix, "mix"), &mut self.mix);
    }
}
