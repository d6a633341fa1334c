//! JSON files for games and strategy profiles.
//!
//! Rationals are written as `"a/b"` strings (or integer strings). Terminal
//! self-loops are implicit in files: a vertex without listed edges gets one
//! on load, and saving omits them again.

use crate::game::{Edge, Game, GameBuilder, GameError, InitializedGame, VectorPayoffGame, VertexId};
use crate::profile::{
    FiniteStateProfile, FiniteStateStrategy, PositionalProfile, Profile, ProfileError, StationaryProfile,
};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn field(field: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn rational_at(s: &str, at: impl Into<String>) -> Result<Rational, FormatError> {
    parse_rational(s).map_err(|e| field(at, e))
}

// ---------------------------------------------------------------------------
// games

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: Vec<String>,
    initial: String,
    vertices: Vec<VertexEntry>,
    #[serde(default)]
    edges: Vec<EdgeEntry>,
    #[serde(default)]
    win_sets: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    id: String,
    #[serde(default)]
    owner: Option<String>,
    #[serde(default)]
    terminal_payoff: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    from: String,
    to: String,
    #[serde(default)]
    prob: Option<String>,
}

/// Parses a game file without desugaring payoff vectors; returns the game
/// and the name of its initial vertex.
pub fn parse_vector_game(text: &str) -> Result<(VectorPayoffGame, String), FormatError> {
    let file: GameFile = serde_json::from_str(text)?;
    let mut seen = HashSet::new();
    for p in &file.players {
        if !seen.insert(p.as_str()) {
            return Err(GameError::DuplicatePlayer(p.clone()).into());
        }
    }
    let player = |name: &str, at: String| {
        file.players
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| field(at, GameError::UnknownPlayer(name.to_string())))
    };

    let mut b = GameBuilder::new(&file.players);
    let mut index: HashMap<&str, VertexId> = HashMap::new();
    for (k, v) in file.vertices.iter().enumerate() {
        if index.contains_key(v.id.as_str()) {
            return Err(GameError::DuplicateVertex(v.id.clone()).into());
        }
        let id = match &v.owner {
            Some(o) => {
                let i = player(o, format!("vertices[{k}].owner"))?;
                b.owned(v.id.clone(), i)
            }
            None => b.stochastic(v.id.clone()),
        };
        index.insert(v.id.as_str(), id);
    }
    let vertex = |name: &str, at: String| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| field(at, GameError::UnknownVertex(name.to_string())))
    };

    for (k, e) in file.edges.iter().enumerate() {
        let from = vertex(&e.from, format!("edges[{k}].from"))?;
        let to = vertex(&e.to, format!("edges[{k}].to"))?;
        let prob = match &e.prob {
            Some(p) => Some(rational_at(p, format!("edges[{k}].prob"))?),
            None => None,
        };
        b.push_edge(from, Edge { to, prob });
    }
    for v in 0..file.vertices.len() {
        if !b.has_edges(v) {
            let prob = b.owner_of(v).is_none().then(Rational::one);
            b.push_edge(v, Edge { to: v, prob });
        }
    }
    for (p, members) in &file.win_sets {
        let i = player(p, format!("win_sets.{p}"))?;
        for (k, m) in members.iter().enumerate() {
            let v = vertex(m, format!("win_sets.{p}[{k}]"))?;
            b.add_win(i, v);
        }
    }
    for (k, v) in file.vertices.iter().enumerate() {
        if let Some(payoff) = &v.terminal_payoff {
            let mut vec = vec![Rational::zero(); file.players.len()];
            for (p, q) in payoff {
                let at = format!("vertices[{k}].terminal_payoff.{p}");
                let i = player(p, at.clone())?;
                vec[i] = rational_at(q, at)?;
            }
            b.set_payoff(index[v.id.as_str()], vec);
        }
    }
    vertex(&file.initial, "initial".to_string())?;
    Ok((b.build(), file.initial))
}

/// Parses, desugars and validates a game file.
pub fn parse_game(text: &str) -> Result<InitializedGame, FormatError> {
    let (vg, initial) = parse_vector_game(text)?;
    let game = vg.desugar()?;
    Ok(InitializedGame::with_initial_name(game, &initial)?)
}

pub fn load_game(path: impl AsRef<Path>) -> Result<InitializedGame, FormatError> {
    parse_game(&read(path.as_ref())?)
}

fn to_file(game: &Game, initial: VertexId, payoffs: &BTreeMap<VertexId, Vec<Rational>>) -> GameFile {
    let vertices = game
        .vertices()
        .map(|v| VertexEntry {
            id: game.name(v).to_string(),
            owner: game.owner(v).map(|i| game.player_name(i).to_string()),
            terminal_payoff: payoffs.get(&v).map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(i, q)| (game.player_name(i).to_string(), format_rational(q)))
                    .collect()
            }),
        })
        .collect();
    let mut edges = Vec::new();
    for v in game.vertices() {
        let out = game.edges(v);
        if out.len() == 1 && out[0].to == v {
            continue;
        }
        for e in out {
            edges.push(EdgeEntry {
                from: game.name(v).to_string(),
                to: game.name(e.to).to_string(),
                prob: e.prob.as_ref().map(format_rational),
            });
        }
    }
    let win_sets = (0..game.num_players())
        .map(|i| {
            (
                game.player_name(i).to_string(),
                game.win_set(i).iter().map(|&v| game.name(v).to_string()).collect(),
            )
        })
        .collect();
    GameFile {
        players: game.players().to_vec(),
        initial: game.name(initial).to_string(),
        vertices,
        edges,
        win_sets,
    }
}

pub fn game_to_json(ig: &InitializedGame) -> String {
    let file = to_file(ig, ig.initial(), &BTreeMap::new());
    serde_json::to_string_pretty(&file).expect("game serialises") + "\n"
}

/// Serialises a game that still carries payoff vectors.
pub fn vector_game_to_json(vg: &VectorPayoffGame, initial: VertexId) -> String {
    let file = to_file(&vg.game, initial, &vg.payoffs);
    serde_json::to_string_pretty(&file).expect("game serialises") + "\n"
}

pub fn save_game(ig: &InitializedGame, path: impl AsRef<Path>) -> Result<(), FormatError> {
    write(path.as_ref(), &game_to_json(ig))
}

// ---------------------------------------------------------------------------
// profiles

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ProfileFile {
    Positional {
        choices: BTreeMap<String, String>,
    },
    Stationary {
        choices: BTreeMap<String, BTreeMap<String, String>>,
    },
    FiniteState {
        #[serde(default)]
        players: BTreeMap<String, StrategyEntry>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyEntry {
    memory: Vec<String>,
    initial: String,
    #[serde(default)]
    update: Vec<UpdateEntry>,
    #[serde(default)]
    choice: Vec<ChoiceEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateEntry {
    memory: String,
    vertex: String,
    next: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiceEntry {
    memory: String,
    vertex: String,
    to: String,
}

/// Parses a profile for `game`; vertex and player names are resolved
/// against the game.
pub fn parse_profile(game: &Game, text: &str) -> Result<Profile, FormatError> {
    let file: ProfileFile = serde_json::from_str(text)?;
    let vertex = |name: &str, at: String| {
        game.vertex_index(name)
            .ok_or_else(|| field(at, GameError::UnknownVertex(name.to_string())))
    };
    match file {
        ProfileFile::Positional { choices } => {
            let mut map = BTreeMap::new();
            for (v, w) in &choices {
                let at = format!("choices.{v}");
                map.insert(vertex(v, at.clone())?, vertex(w, at)?);
            }
            Ok(Profile::Positional(PositionalProfile::new(game, &map)?))
        }
        ProfileFile::Stationary { choices } => {
            let mut map = BTreeMap::new();
            for (v, dist) in &choices {
                let mut d = BTreeMap::new();
                for (w, p) in dist {
                    let at = format!("choices.{v}.{w}");
                    d.insert(vertex(w, at.clone())?, rational_at(p, at)?);
                }
                map.insert(vertex(v, format!("choices.{v}"))?, d);
            }
            Ok(Profile::Stationary(StationaryProfile::new(game, &map)?))
        }
        ProfileFile::FiniteState { players } => {
            let mut strategies = vec![FiniteStateStrategy::memoryless(); game.num_players()];
            for (p, entry) in &players {
                let i = game
                    .player_index(p)
                    .ok_or_else(|| field(format!("players.{p}"), GameError::UnknownPlayer(p.clone())))?;
                let mem = |m: &str, at: String| {
                    entry
                        .memory
                        .iter()
                        .position(|x| x == m)
                        .ok_or_else(|| field(at, format!("unknown memory state `{m}`")))
                };
                let mut s = FiniteStateStrategy {
                    memory: entry.memory.clone(),
                    initial: mem(&entry.initial, format!("players.{p}.initial"))?,
                    update: BTreeMap::new(),
                    choice: BTreeMap::new(),
                };
                for (k, u) in entry.update.iter().enumerate() {
                    let at = format!("players.{p}.update[{k}]");
                    s.update.insert(
                        (mem(&u.memory, at.clone())?, vertex(&u.vertex, at.clone())?),
                        mem(&u.next, at)?,
                    );
                }
                for (k, c) in entry.choice.iter().enumerate() {
                    let at = format!("players.{p}.choice[{k}]");
                    s.choice.insert(
                        (mem(&c.memory, at.clone())?, vertex(&c.vertex, at.clone())?),
                        vertex(&c.to, at)?,
                    );
                }
                strategies[i] = s;
            }
            Ok(Profile::FiniteState(FiniteStateProfile::new(game, strategies)?))
        }
    }
}

pub fn load_profile(game: &Game, path: impl AsRef<Path>) -> Result<Profile, FormatError> {
    parse_profile(game, &read(path.as_ref())?)
}

pub fn profile_to_json(game: &Game, profile: &Profile) -> String {
    let name = |v: VertexId| game.name(v).to_string();
    let file = match profile {
        Profile::Positional(p) => ProfileFile::Positional {
            choices: p.choices().into_iter().map(|(v, w)| (name(v), name(w))).collect(),
        },
        Profile::Stationary(p) => ProfileFile::Stationary {
            choices: p
                .distributions()
                .into_iter()
                .map(|(v, d)| {
                    (
                        name(v),
                        d.into_iter().map(|(w, q)| (name(w), format_rational(&q))).collect(),
                    )
                })
                .collect(),
        },
        Profile::FiniteState(p) => ProfileFile::FiniteState {
            players: p
                .strategies()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let m = |k: usize| s.memory[k].clone();
                    (
                        game.player_name(i).to_string(),
                        StrategyEntry {
                            memory: s.memory.clone(),
                            initial: m(s.initial),
                            update: s
                                .update
                                .iter()
                                .map(|(&(a, v), &b)| UpdateEntry {
                                    memory: m(a),
                                    vertex: name(v),
                                    next: m(b),
                                })
                                .collect(),
                            choice: s
                                .choice
                                .iter()
                                .map(|(&(a, v), &w)| ChoiceEntry {
                                    memory: m(a),
                                    vertex: name(v),
                                    to: name(w),
                                })
                                .collect(),
                        },
                    )
                })
                .collect(),
        },
    };
    serde_json::to_string_pretty(&file).expect("profile serialises") + "\n"
}

pub fn save_profile(game: &Game, profile: &Profile, path: impl AsRef<Path>) -> Result<(), FormatError> {
    write(path.as_ref(), &profile_to_json(game, profile))
}
