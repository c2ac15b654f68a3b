//! Line-mode draft against the engine.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{Context, Result};

use draftgame::io::{format_score, serialize_position};
use draftgame::{
    engine_move, evaluate_moves, final_score, provisional_values, MoveValue, Player, Position, SolveOptions,
};

fn value_text(v: &MoveValue, scale: u32) -> String {
    match v {
        MoveValue::Exact { value } => format_score(value, scale),
        MoveValue::Bounds { lower, upper } => {
            format!("[{}, {}]", format_score(lower, scale), format_score(upper, scale))
        }
    }
}

fn show<W: Write>(pos: &Position, out: &mut W) -> Result<()> {
    let inst = pos.instance();
    let list = |p: Player| -> String {
        let v: Vec<String> = pos
            .picked(p)
            .iter()
            .map(|&k| format!("{} {}", inst.agent(k).id, inst.agent(k)))
            .collect();
        if v.is_empty() { "-".into() } else { v.join(", ") }
    };
    let free: Vec<String> = pos
        .free()
        .iter()
        .map(|&k| format!("{} {}", inst.agent(k).id, inst.agent(k)))
        .collect();
    writeln!(out, "free: {}", free.join(", "))?;
    writeln!(out, "Alice: {}", list(Player::Alice))?;
    writeln!(out, "Bob: {}", list(Player::Bob))?;
    Ok(())
}

fn provisional<W: Write>(pos: &Position, out: &mut W) -> Result<()> {
    let (a, b) = provisional_values(pos);
    let s = pos.instance().scale_pow10;
    writeln!(
        out,
        "provisional: Alice {}, Bob {}, score {}",
        format_score(&a, s),
        format_score(&b, s),
        format_score(&(&a - &b), s)
    )?;
    Ok(())
}

/// Runs the loop until the draft ends, `quit`, or end of input (which also
/// saves).
pub fn run<R: BufRead, W: Write>(
    mut pos: Position,
    human: Player,
    opts: &SolveOptions,
    save: &Path,
    input: &mut R,
    out: &mut W,
) -> Result<()> {
    let scale = pos.instance().scale_pow10;
    writeln!(out, "you play {human}; enter an agent id, `hint`, `show` or `quit`")?;
    show(&pos, out)?;
    loop {
        if pos.is_terminal() {
            let score = final_score(&pos)?;
            writeln!(out, "final score {}", format_score(&score, scale))?;
            return Ok(());
        }
        if pos.to_move() != human {
            let (mv, value) = engine_move(&pos, opts)?;
            let agent = pos.instance().agent(mv);
            writeln!(
                out,
                "engine ({}) picks {} {} (value {})",
                human.other(),
                agent.id,
                agent,
                value_text(&value, scale)
            )?;
            pos = pos.play(mv)?;
            provisional(&pos, out)?;
            continue;
        }
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        let cmd = if input.read_line(&mut line)? == 0 { "quit" } else { line.trim() };
        match cmd {
            "" => {}
            "quit" | "exit" => {
                fs::write(save, serialize_position(&pos))
                    .with_context(|| format!("writing {}", save.display()))?;
                writeln!(out, "saved position to {}", save.display())?;
                return Ok(());
            }
            "show" => show(&pos, out)?,
            "hint" => {
                let evals = evaluate_moves(&pos, opts)?;
                let key = |v: &MoveValue| v.exact().cloned();
                let best = if human == Player::Alice {
                    evals.iter().filter_map(|e| key(&e.value)).max()
                } else {
                    evals.iter().filter_map(|e| key(&e.value)).min()
                };
                for e in &evals {
                    let a = pos.instance().agent(e.agent);
                    let mark = if best.is_some() && key(&e.value) == best { " *" } else { "" };
                    writeln!(out, "  {} {}: {}{mark}", a.id, a, value_text(&e.value, scale))?;
                }
            }
            id => match pos.play_id(id) {
                Ok(next) if pos.to_move() == human => {
                    pos = next;
                    provisional(&pos, out)?;
                }
                Ok(_) => unreachable!("the engine moves before prompting"),
                Err(e) => writeln!(out, "illegal pick: {e}")?,
            },
        }
    }
}
