//! Desk-scale configurations for the five figures.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        description: "Gaussian-ensemble rate versus dimension",
        text: "\
experiment = rate-scaling
kinds = goe, gue, gse
# Even N only, so that GSE is defined at every point.
n_grid = 4, 8, 12, 16, 20, 24, 32, 40, 48
n_realizations = 1000
n_states = 5
p0_policy = pure+uniform
scale_note = five pure and five uniform-purity states per point; N up to 48 instead of 55
",
    },
    Preset {
        name: "fig2",
        description: "Ensemble-mean purity decay against the exponential ansatz, N = 8",
        text: "\
experiment = purity-decay
kinds = gue, ginue
n_grid = 8
p0_list = 1, 0.5, 0.125
n_realizations = 500
n_points = 61
n_jumps = 1
",
    },
    Preset {
        name: "fig3",
        description: "Distribution of the state-averaged rate, GOE, N = 30",
        text: "\
experiment = rate-distribution
kinds = goe
n_grid = 30
n_states = 5000
n_realizations = 1000
histogram_bins = 40
scale_note = 5000 initial states instead of 50000
",
    },
    Preset {
        name: "fig4",
        description: "Cumulants of the rate distribution versus dimension",
        text: "\
experiment = cumulant-table
kinds = goe, ginue
n_grid = 10, 30, 100, 300, 1000
n_states = 10000
empirical = analytic
",
    },
    Preset {
        name: "fig-gin",
        description: "Ginibre-ensemble rate versus dimension",
        text: "\
experiment = gin-rate-scaling
kinds = ginoe, ginue, ginse
n_grid = 4, 8, 12, 16, 20, 24, 32, 40, 48
n_realizations = 1000
n_states = 5
p0_policy = pure+uniform
scale_note = five pure and five uniform-purity states per point; N up to 48
",
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
