//! Per-event game trace, written as one CSV row per event.

use std::io::Write;

use super::{NodeId, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Launch,
    Wait,
    /// Arrival at a neutral node.
    Occupy,
    /// Arrival at a node the side already owns.
    Reinforce,
    /// Arrival beat the defending garrison.
    Capture,
    /// Defending garrison beat the arrival.
    Repulse,
    /// Arrival and garrison annihilated each other.
    Draw,
    /// Opposing expeditions met on an arc.
    ArcBattle,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Launch => "launch",
            EventKind::Wait => "wait",
            EventKind::Occupy => "occupy",
            EventKind::Reinforce => "reinforce",
            EventKind::Capture => "capture",
            EventKind::Repulse => "repulse",
            EventKind::Draw => "draw",
            EventKind::ArcBattle => "arc_battle",
        }
    }
}

/// `side` is the acting side (the arriving side for node battles, the winner for
/// arc battles, `None` for a drawn arc battle). For waits `size` holds the tick count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameEvent {
    pub tick: u32,
    pub side: Option<Side>,
    pub kind: EventKind,
    pub from: NodeId,
    pub to: NodeId,
    pub size: f64,
    pub survivors: f64,
    pub score_blue: f64,
}

pub const TRACE_HEADER: [&str; 8] = ["tick", "side", "eventType", "from", "to", "size", "survivors", "scoreBlue"];

pub fn write_trace<W: Write>(out: W, events: &[GameEvent]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for ev in events {
        w.write_record([
            ev.tick.to_string(),
            ev.side.map_or("none", Side::name).to_string(),
            ev.kind.as_str().to_string(),
            ev.from.to_string(),
            ev.to.to_string(),
            format!("{:.6}", ev.size),
            format!("{:.6}", ev.survivors),
            format!("{:.6}", ev.score_blue),
        ])?;
    }
    w.flush()?;
    Ok(())
}
