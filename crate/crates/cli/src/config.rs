//! Run configuration: a TOML file plus command-line overrides.

use std::path::PathBuf;

use bursty::inference::{BurstKind, Divergence};
use bursty::solver::{GridSpec, TimeSpec};
use bursty::specfun::E1Region;
use bursty::ssa::Record;
use bursty::{BurstDist, ExpansionSpec, Method, ModelParams};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

/// Which solver route(s) a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Expansion,
    Quadrature,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Expansion => vec![Method::Expansion],
            MethodChoice::Quadrature => vec![Method::Quadrature],
            MethodChoice::Both => vec![Method::Expansion, Method::Quadrature],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TimeValue {
    Label(String),
    At(f64),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    k_i: f64,
    beta: f64,
    gamma: f64,
    burst: BurstDist,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ExpansionSection {
    n_t: u32,
    n_l: u32,
    alpha: Option<f64>,
    method: MethodChoice,
}

impl Default for ExpansionSection {
    fn default() -> Self {
        Self { n_t: 7, n_l: 7, alpha: None, method: MethodChoice::Expansion }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GridSection {
    n: usize,
    m: usize,
    time: TimeValue,
    initial: [u64; 2],
    aliasing_tolerance: Option<f64>,
    check_aliasing: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: 128,
            m: 128,
            time: TimeValue::Label("steady_state".into()),
            initial: [0, 0],
            aliasing_tolerance: None,
            check_aliasing: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimulateSection {
    cells: usize,
    t_final: Option<f64>,
    seed: u64,
    record: Record,
    max_events: Option<u64>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { cells: 100_000, t_final: None, seed: 0, record: Record::Endpoint, max_events: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SweepSection {
    data: Option<PathBuf>,
    kind: BurstKind,
    k_log10: [f64; 2],
    b_log10: [f64; 2],
    k_len: usize,
    b_len: usize,
    divergence: Divergence,
    orders_sweep: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            data: None,
            kind: BurstKind::Geometric,
            k_log10: [-1.0, 1.0],
            b_log10: [0.2, 2.0],
            k_len: 10,
            b_len: 10,
            divergence: Divergence::Kl,
            orders_sweep: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BenchSection {
    len: usize,
    extent: f64,
    region: Option<String>,
    full: bool,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self { len: 200, extent: 35.0, region: None, full: false }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<Spanned<ModelSection>>,
    #[serde(default)]
    expansion: Option<Spanned<ExpansionSection>>,
    #[serde(default)]
    grid: Option<Spanned<GridSection>>,
    #[serde(default)]
    simulate: Option<Spanned<SimulateSection>>,
    #[serde(default)]
    sweep: Option<Spanned<SweepSection>>,
    #[serde(default)]
    bench: Option<Spanned<BenchSection>>,
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub method: Option<MethodChoice>,
    pub orders: Option<(u32, u32)>,
    pub seed: Option<u64>,
    pub grid: Option<(usize, usize)>,
    pub full: bool,
    pub region: Option<String>,
    pub orders_sweep: bool,
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionSettings {
    pub n_t: u32,
    pub n_l: u32,
    pub alpha: Option<f64>,
    pub method: MethodChoice,
}

impl ExpansionSettings {
    pub fn spec(&self, method: Method, burst: &BurstDist) -> bursty::Result<ExpansionSpec> {
        let spec = ExpansionSpec::new(self.n_t, self.n_l, method, burst)?;
        let spec = match self.alpha {
            Some(alpha) => spec.with_alpha(alpha),
            None => spec,
        };
        spec.validate(burst)?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSettings {
    pub cells: usize,
    pub t_final: f64,
    pub seed: u64,
    pub record: Record,
    pub max_events: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSettingsConfig {
    pub data: Option<PathBuf>,
    pub kind: BurstKind,
    pub k_log10: [f64; 2],
    pub b_log10: [f64; 2],
    pub k_len: usize,
    pub b_len: usize,
    pub divergence: Divergence,
    pub orders_sweep: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSettings {
    pub len: usize,
    pub extent: f64,
    pub region: Option<E1Region>,
}

/// Fully resolved and validated configuration, embedded in every metadata file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: Option<ModelParams>,
    pub expansion: ExpansionSettings,
    pub grid: GridSpec,
    pub simulate: SimulateSettings,
    pub sweep: SweepSettingsConfig,
    pub bench: BenchSettings,
}

impl RunConfig {
    pub fn model(&self) -> Result<&ModelParams, CliError> {
        self.model.as_ref().ok_or_else(|| CliError::config(None, "the [model] section is required for this command"))
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

fn anchored<T>(src: &str, section: &Spanned<T>) -> impl Fn(String) -> CliError {
    let line = line_of(src, section.span().start);
    move |msg| CliError::config(Some(line), msg)
}

/// Parse `src` and apply `over`. Every error carries the line of the offending section.
pub fn parse(src: &str, over: &Overrides) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| line_of(src, s.start));
        CliError::config(line, e.message().trim().to_string())
    })?;

    let model = match &raw.model {
        Some(section) => {
            let err = anchored(src, section);
            let m = section.get_ref();
            let params = ModelParams::new(m.k_i, m.beta, m.gamma, m.burst).map_err(|e| err(format!("[model] {e}")))?;
            Some(params)
        }
        None => None,
    };

    let default_expansion = Spanned::new(0..0, ExpansionSection::default());
    let section = raw.expansion.as_ref().unwrap_or(&default_expansion);
    let err = anchored(src, section);
    let e = section.get_ref();
    let (n_l, n_t) = over.orders.unwrap_or((e.n_l, e.n_t));
    let expansion = ExpansionSettings { n_t, n_l, alpha: e.alpha, method: over.method.unwrap_or(e.method) };
    if let Some(m) = &model {
        for method in expansion.method.methods() {
            expansion.spec(method, &m.burst).map_err(|e| err(format!("[expansion] {e}")))?;
        }
    }

    let default_grid = Spanned::new(0..0, GridSection::default());
    let section = raw.grid.as_ref().unwrap_or(&default_grid);
    let err = anchored(src, section);
    let g = section.get_ref();
    let (n, m) = over.grid.unwrap_or((g.n, g.m));
    let time = match &g.time {
        TimeValue::Label(s) if s == "steady_state" => TimeSpec::SteadyState,
        TimeValue::Label(s) => return Err(err(format!("[grid] time must be a number or \"steady_state\", got {s:?}"))),
        TimeValue::At(t) => TimeSpec::At(*t),
    };
    let mut grid = GridSpec { n, m, time, ..GridSpec::steady_state(n, m) };
    grid = grid.with_initial(g.initial[0], g.initial[1]);
    if let Some(tol) = g.aliasing_tolerance {
        grid.aliasing_tolerance = Some(tol);
    }
    if !g.check_aliasing {
        grid = grid.without_aliasing_check();
    }
    grid.validate().map_err(|e| err(format!("[grid] {e}")))?;

    let default_simulate = Spanned::new(0..0, SimulateSection::default());
    let section = raw.simulate.as_ref().unwrap_or(&default_simulate);
    let err = anchored(src, section);
    let s = section.get_ref();
    let t_final = match (s.t_final, time, &model) {
        (Some(t), _, _) => t,
        (None, TimeSpec::At(t), _) => t,
        (None, TimeSpec::SteadyState, Some(p)) => TimeSpec::SteadyState.horizon(p),
        (None, TimeSpec::SteadyState, None) => 0.0,
    };
    let simulate = SimulateSettings {
        cells: s.cells,
        t_final,
        seed: over.seed.unwrap_or(s.seed),
        record: s.record,
        max_events: s.max_events.unwrap_or(bursty::ssa::DEFAULT_MAX_EVENTS),
    };
    if simulate.cells == 0 {
        return Err(err("[simulate] cells must be >= 1".into()));
    }
    if !(simulate.t_final >= 0.0 && simulate.t_final.is_finite()) {
        return Err(err(format!("[simulate] t_final = {}", simulate.t_final)));
    }

    let default_sweep = Spanned::new(0..0, SweepSection::default());
    let section = raw.sweep.as_ref().unwrap_or(&default_sweep);
    let err = anchored(src, section);
    let w = section.get_ref();
    let sweep = SweepSettingsConfig {
        data: over.data.clone().or_else(|| w.data.clone()),
        kind: w.kind,
        k_log10: w.k_log10,
        b_log10: w.b_log10,
        k_len: w.k_len,
        b_len: w.b_len,
        divergence: w.divergence,
        orders_sweep: over.orders_sweep || w.orders_sweep,
    };
    if sweep.k_len == 0 || sweep.b_len == 0 {
        return Err(err("[sweep] k_len and b_len must be >= 1".into()));
    }
    for (name, r, len) in [("k_log10", sweep.k_log10, sweep.k_len), ("b_log10", sweep.b_log10, sweep.b_len)] {
        if !(r[0].is_finite() && r[1].is_finite()) || (len > 1 && r[0] >= r[1]) {
            return Err(err(format!("[sweep] {name} must be an increasing pair, got {r:?}")));
        }
    }
    if sweep.kind == BurstKind::ShiftedGeometric && sweep.b_log10[0] <= 0.0 {
        return Err(err("[sweep] the shifted geometric law needs b > 1 (b_log10 > 0)".into()));
    }

    let default_bench = Spanned::new(0..0, BenchSection::default());
    let section = raw.bench.as_ref().unwrap_or(&default_bench);
    let err = anchored(src, section);
    let b = section.get_ref();
    let label = over.region.clone().or_else(|| b.region.clone());
    let region = match label {
        Some(l) => Some(E1Region::from_label(&l).ok_or_else(|| {
            let known: Vec<&str> = E1Region::ALL.iter().map(|r| r.label()).collect();
            err(format!("[bench] unknown region {l:?}; expected one of {}", known.join(", ")))
        })?),
        None => None,
    };
    let bench = BenchSettings { len: if over.full || b.full { 1000 } else { b.len }, extent: b.extent, region };
    if bench.len < 2 || bench.extent.is_nan() || bench.extent <= 0.0 {
        return Err(err("[bench] len must be >= 2 and extent > 0".into()));
    }

    Ok(RunConfig { model, expansion, grid, simulate, sweep, bench })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
k_i = 2.5
beta = 1.0
gamma = 1.0
burst = { kind = "geometric", b = 19.0 }

[grid]
n = 64
m = 48
time = 3.5
"#;

    #[test]
    fn parses_sections_and_overrides() {
        let c = parse(BASE, &Overrides::default()).unwrap();
        assert_eq!(c.model.unwrap().k_i, 2.5);
        assert_eq!((c.grid.n, c.grid.m), (64, 48));
        assert_eq!(c.grid.time, TimeSpec::At(3.5));
        assert_eq!(c.simulate.t_final, 3.5);
        let over = Overrides { orders: Some((3, 5)), grid: Some((32, 16)), seed: Some(9), ..Default::default() };
        let c = parse(BASE, &over).unwrap();
        assert_eq!((c.expansion.n_l, c.expansion.n_t), (3, 5));
        assert_eq!((c.grid.n, c.grid.m), (32, 16));
        assert_eq!(c.simulate.seed, 9);
    }

    #[test]
    fn invalid_values_report_their_section_line() {
        let src = BASE.replace("beta = 1.0", "beta = -1.0");
        let e = parse(&src, &Overrides::default()).unwrap_err();
        assert_eq!(e.line, Some(2));
        let src = format!("{BASE}\n[bench]\nregion = \"nowhere\"\n");
        let e = parse(&src, &Overrides::default()).unwrap_err();
        assert_eq!(e.line, Some(13));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = parse("[model]\nk_i = \n", &Overrides::default()).unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse("[grid]\nsize = 3\n", &Overrides::default()).unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn defaults_without_model() {
        let c = parse("", &Overrides { full: true, ..Default::default() }).unwrap();
        assert!(c.model.is_none());
        assert_eq!(c.bench.len, 1000);
        assert_eq!(c.grid.time, TimeSpec::SteadyState);
    }
}
