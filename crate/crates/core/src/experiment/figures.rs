//! Bundled sweep configurations for the published figures.

/// `(name, TOML text)` for every bundled configuration.
pub const FIGURES: &[(&str, &str)] = &[
    ("fig1", include_str!("../../configs/fig1.toml")),
    ("fig2", include_str!("../../configs/fig2.toml")),
    ("fig2e", include_str!("../../configs/fig2e.toml")),
    ("fig3", include_str!("../../configs/fig3.toml")),
    ("fig4", include_str!("../../configs/fig4.toml")),
    ("fig5", include_str!("../../configs/fig5.toml")),
    ("fig6", include_str!("../../configs/fig6.toml")),
    ("fig7", include_str!("../../configs/fig7.toml")),
];

pub fn bundled_config(name: &str) -> Option<&'static str> {
    FIGURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIGURES.iter().map(|(n, _)| *n)
}
