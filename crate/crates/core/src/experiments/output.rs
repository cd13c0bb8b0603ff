use std::io::Write;

use super::stats::binomial_cdf;
use super::{whole_wins, GameRecord, SweepCell, SweepResult, WinRateTable};

/// Win-rate matrix: header row and first column are agent names, cells are row-vs-column
/// percentages to 0.1, and the last column is the row average.
pub fn write_win_rates<W: Write>(table: &WinRateTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(table.agents.iter().cloned());
    header.push("Avg".into());
    w.write_record(&header)?;
    for (i, agent) in table.agents.iter().enumerate() {
        let mut row = vec![agent.clone()];
        row.extend((0..table.agents.len()).map(|j| format!("{:.1}", table.rate(i, j))));
        row.push(format!("{:.1}", table.average(i)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Significance marks in the matrix layout: `1` where the row agent is within the
/// binomial bound of the column's best.
pub fn write_marks<W: Write>(table: &WinRateTable, alpha: f64, out: W) -> csv::Result<()> {
    let marks = table.marks(alpha);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(table.agents.iter().cloned());
    w.write_record(&header)?;
    for (i, agent) in table.agents.iter().enumerate() {
        let mut row = vec![agent.clone()];
        row.extend(marks[i].iter().map(|&m| if m { "1" } else { "0" }.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-game records. Wall-clock timing is left out so the file is reproducible.
pub fn write_records<W: Write>(records: &[GameRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mapId",
        "seed",
        "blueAgent",
        "redAgent",
        "blueStart",
        "redStart",
        "winner",
        "finalScoreBlue",
        "ticksPlayed",
        "decisionsBlue",
        "decisionsRed",
        "searchEventsBlue",
        "searchEventsRed",
    ])?;
    for r in records {
        w.write_record([
            r.map_id.to_string(),
            r.seed.to_string(),
            r.blue_agent.clone(),
            r.red_agent.clone(),
            r.blue_start.to_string(),
            r.red_start.to_string(),
            format!("{:?}", r.winner),
            format!("{:.6}", r.final_score_blue),
            r.ticks_played.to_string(),
            r.decisions[0].to_string(),
            r.decisions[1].to_string(),
            r.search_events[0].to_string(),
            r.search_events[1].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cell_fields(c: &SweepCell) -> [String; 5] {
    let (lo, hi) = c.ci99();
    [
        c.games.to_string(),
        format!("{}", c.points),
        format!("{:.4}", c.rate()),
        format!("{:.4}", lo),
        format!("{:.4}", hi),
    ]
}

/// The full offence x defence grid with 99% Wilson intervals.
pub fn write_sweep_grid<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["offence", "defence", "games", "wins", "winRate", "ci99Low", "ci99High"])?;
    for c in &result.cells {
        let mut row = vec![format!("{}", c.offence), format!("{}", c.defence)];
        row.extend(cell_fields(c));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One-tailed exact binomial p-values for a marginal point against its baseline rate:
/// (P(X <= wins), P(X >= wins)) under the baseline.
pub fn against_baseline(cell: &SweepCell, baseline: &SweepCell) -> (f64, f64) {
    let wins = whole_wins(cell.points);
    let p0 = baseline.rate();
    let below = binomial_cdf(wins, cell.games, p0);
    let above = if wins == 0 { 1.0 } else { 1.0 - binomial_cdf(wins - 1, cell.games, p0) };
    (below, above)
}

/// Win rate against offence, aggregated over defence, beside the no-model baseline.
pub fn write_sweep_marginal<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "offence",
        "games",
        "wins",
        "winRate",
        "ci99Low",
        "ci99High",
        "baselineGames",
        "baselineWins",
        "baselineRate",
        "baselineLow",
        "baselineHigh",
        "pBelowBaseline",
        "pAboveBaseline",
    ])?;
    for c in SweepResult::marginal(&result.cells) {
        let base = result.baseline_for(c.offence);
        let (below, above) = against_baseline(&c, &base);
        let mut row = vec![format!("{}", c.offence)];
        row.extend(cell_fields(&c));
        row.extend(cell_fields(&base));
        row.push(format!("{:.6}", below));
        row.push(format!("{:.6}", above));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
