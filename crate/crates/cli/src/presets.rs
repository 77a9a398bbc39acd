//! Built-in sweep descriptions, selectable by name.

pub const NAMES: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

/// Spec text of the named preset.
pub fn get(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => include_str!("../presets/fig2.spec"),
        "fig3" => include_str!("../presets/fig3.spec"),
        "fig4" => include_str!("../presets/fig4.spec"),
        "fig5" => include_str!("../presets/fig5.spec"),
        "fig6" => include_str!("../presets/fig6.spec"),
        "fig7" => include_str!("../presets/fig7.spec"),
        _ => return None,
    })
}
