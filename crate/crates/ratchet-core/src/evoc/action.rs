use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::Error;

/// Vertical posture of one body part during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Posture {
    Up,
    Down,
    Still,
}

impl Posture {
    pub const ALL: [Posture; 3] = [Posture::Up, Posture::Down, Posture::Still];

    pub fn is_moving(self) -> bool {
        self != Posture::Still
    }

    /// The reverse direction of a moving posture.
    pub fn opposite(self) -> Result<Posture, Error> {
        match self {
            Posture::Up => Ok(Posture::Down),
            Posture::Down => Ok(Posture::Up),
            Posture::Still => Err(Error::NoOpposite),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Posture::Up => "UP",
            Posture::Down => "DOWN",
            Posture::Still => "STILL",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyPart {
    Head,
    LeftArm,
    RightArm,
    LeftLeg,
    RightLeg,
    Hips,
}

impl BodyPart {
    pub const ALL: [BodyPart; 6] = [
        BodyPart::Head,
        BodyPart::LeftArm,
        BodyPart::RightArm,
        BodyPart::LeftLeg,
        BodyPart::RightLeg,
        BodyPart::Hips,
    ];

    /// Arms in the order used to pick the chaining arm.
    pub const ARMS: [BodyPart; 2] = [BodyPart::LeftArm, BodyPart::RightArm];

    pub fn as_str(self) -> &'static str {
        match self {
            BodyPart::Head => "head",
            BodyPart::LeftArm => "left_arm",
            BodyPart::RightArm => "right_arm",
            BodyPart::LeftLeg => "left_leg",
            BodyPart::RightLeg => "right_leg",
            BodyPart::Hips => "hips",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One posture for each of the six body parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionStep {
    postures: [Posture; 6],
}

impl ActionStep {
    /// Number of distinct steps, 3^6.
    pub const SPACE_SIZE: usize = 729;

    pub const STILL: ActionStep = ActionStep {
        postures: [Posture::Still; 6],
    };

    pub fn new(postures: [Posture; 6]) -> Self {
        ActionStep { postures }
    }

    /// Decodes a step from its base-3 index, head being the most
    /// significant digit.
    pub fn from_index(mut index: usize) -> Self {
        assert!(index < Self::SPACE_SIZE, "step index {index} out of range");
        let mut postures = [Posture::Still; 6];
        for slot in postures.iter_mut().rev() {
            *slot = Posture::ALL[index % 3];
            index /= 3;
        }
        ActionStep { postures }
    }

    pub fn index(&self) -> usize {
        self.postures.iter().fold(0, |acc, p| acc * 3 + p.index())
    }

    /// Iterates over all 729 steps in index order.
    pub fn all() -> impl Iterator<Item = ActionStep> {
        (0..Self::SPACE_SIZE).map(ActionStep::from_index)
    }

    pub fn posture(&self, part: BodyPart) -> Posture {
        self.postures[part.index()]
    }

    pub fn set(&mut self, part: BodyPart, posture: Posture) {
        self.postures[part.index()] = posture;
    }

    pub fn with(mut self, part: BodyPart, posture: Posture) -> Self {
        self.set(part, posture);
        self
    }

    pub fn postures(&self) -> &[Posture; 6] {
        &self.postures
    }

    pub fn moving_parts(&self) -> usize {
        self.postures.iter().filter(|p| p.is_moving()).count()
    }

    /// First moving arm, left before right.
    pub fn first_moving_arm(&self) -> Option<BodyPart> {
        BodyPart::ARMS
            .into_iter()
            .find(|&arm| self.posture(arm).is_moving())
    }

    /// The same step with left and right limbs exchanged.
    pub fn mirrored(&self) -> Self {
        let mut m = *self;
        m.set(BodyPart::LeftArm, self.posture(BodyPart::RightArm));
        m.set(BodyPart::RightArm, self.posture(BodyPart::LeftArm));
        m.set(BodyPart::LeftLeg, self.posture(BodyPart::RightLeg));
        m.set(BodyPart::RightLeg, self.posture(BodyPart::LeftLeg));
        m
    }
}

impl fmt::Display for ActionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.postures.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

/// Which head posture earns the head reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HeadMode {
    #[default]
    RewardStill,
    RewardMoving,
}

impl HeadMode {
    pub fn flipped(self) -> Self {
        match self {
            HeadMode::RewardStill => HeadMode::RewardMoving,
            HeadMode::RewardMoving => HeadMode::RewardStill,
        }
    }
}

/// Which relation between the two moving limbs of a pair counts as
/// symmetrical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SymMode {
    #[default]
    RewardSame,
    RewardOpposite,
}

impl SymMode {
    pub fn flipped(self) -> Self {
        match self {
            SymMode::RewardSame => SymMode::RewardOpposite,
            SymMode::RewardOpposite => SymMode::RewardSame,
        }
    }
}

/// Weights of the single-step fitness function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FitnessParams {
    pub w_head_still: f64,
    pub w_limb_move: f64,
    pub w_pair_sym: f64,
    pub head_mode: HeadMode,
    pub sym_mode: SymMode,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams {
            w_head_still: 2.0,
            w_limb_move: 1.0,
            w_pair_sym: 2.0,
            head_mode: HeadMode::RewardStill,
            sym_mode: SymMode::RewardSame,
        }
    }
}

impl FitnessParams {
    pub fn validate(&self) -> Result<(), Error> {
        for (key, w) in [
            ("w_head_still", self.w_head_still),
            ("w_limb_move", self.w_limb_move),
            ("w_pair_sym", self.w_pair_sym),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::config(key, alloc::format!("{w} must be a finite weight >= 0")));
            }
        }
        Ok(())
    }

    /// Upper bound of [`step_fitness`] under these weights.
    pub fn max_step_fitness(&self) -> f64 {
        self.w_head_still + 2.0 * (2.0 * self.w_limb_move + self.w_pair_sym)
    }

    /// Short label such as `still-same`, used in CSV output.
    pub fn mode_label(&self) -> &'static str {
        match (self.head_mode, self.sym_mode) {
            (HeadMode::RewardStill, SymMode::RewardSame) => "still-same",
            (HeadMode::RewardStill, SymMode::RewardOpposite) => "still-opposite",
            (HeadMode::RewardMoving, SymMode::RewardSame) => "moving-same",
            (HeadMode::RewardMoving, SymMode::RewardOpposite) => "moving-opposite",
        }
    }
}

/// Fitness of a single step: a head reward plus, for the arm pair and the
/// leg pair, credit per moving limb and a bonus when both limbs move
/// symmetrically. Hips never contribute.
pub fn step_fitness(step: &ActionStep, params: &FitnessParams) -> f64 {
    let head = step.posture(BodyPart::Head);
    let head_ok = match params.head_mode {
        HeadMode::RewardStill => !head.is_moving(),
        HeadMode::RewardMoving => head.is_moving(),
    };
    let mut total = if head_ok { params.w_head_still } else { 0.0 };

    let pairs = [
        (BodyPart::LeftArm, BodyPart::RightArm),
        (BodyPart::LeftLeg, BodyPart::RightLeg),
    ];
    for (left, right) in pairs {
        let (l, r) = (step.posture(left), step.posture(right));
        let moving = l.is_moving() as u8 + r.is_moving() as u8;
        total += params.w_limb_move * f64::from(moving);
        if moving == 2 {
            let symmetric = match params.sym_mode {
                SymMode::RewardSame => l == r,
                SymMode::RewardOpposite => l != r,
            };
            if symmetric {
                total += params.w_pair_sym;
            }
        }
    }
    total
}

/// Rule broken by a candidate chained action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainViolation {
    Empty,
    /// The chain is longer than the configured cap.
    TooLong { len: usize, max: usize },
    /// A multi-step chain whose first step moves neither arm.
    FirstStepMovesNoArm,
    /// A multi-step chain without a chaining arm, or whose chaining arm is
    /// not the first moving arm of step 1.
    WrongChainArm {
        expected: BodyPart,
        got: Option<BodyPart>,
    },
    /// Interior step (1-indexed) whose chaining-arm posture is not the
    /// opposite of the previous step's.
    NoAlternation { step: usize },
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainViolation::Empty => f.write_str("chain has no steps"),
            ChainViolation::TooLong { len, max } => {
                write!(f, "chain length {len} exceeds max_chain_length {max}")
            }
            ChainViolation::FirstStepMovesNoArm => f.write_str("first step must move an arm"),
            ChainViolation::WrongChainArm { expected, got } => match got {
                Some(got) => write!(
                    f,
                    "chain arm is {}, expected the first moving arm {}",
                    got.as_str(),
                    expected.as_str()
                ),
                None => write!(f, "chain arm missing, expected {}", expected.as_str()),
            },
            ChainViolation::NoAlternation { step } => write!(
                f,
                "interior step {step} does not reverse the chain arm of step {}",
                step - 1
            ),
        }
    }
}

/// Checks the chaining rules on a step list. Steps are reported 1-indexed.
///
/// The final step is exempt from alternation: a step that fails to reverse
/// the chain arm ends the chain but still belongs to it.
pub fn validate_chain(
    steps: &[ActionStep],
    chain_arm: Option<BodyPart>,
    max_len: Option<usize>,
) -> Result<(), ChainViolation> {
    let n = steps.len();
    if n == 0 {
        return Err(ChainViolation::Empty);
    }
    if let Some(max) = max_len {
        if n > max {
            return Err(ChainViolation::TooLong { len: n, max });
        }
    }
    if n == 1 {
        return Ok(());
    }
    let expected = steps[0]
        .first_moving_arm()
        .ok_or(ChainViolation::FirstStepMovesNoArm)?;
    if chain_arm != Some(expected) {
        return Err(ChainViolation::WrongChainArm {
            expected,
            got: chain_arm,
        });
    }
    // 1-indexed interior steps 2..=n-1 must reverse their predecessor.
    for k in 2..n {
        let prev = steps[k - 2].posture(expected);
        let cur = steps[k - 1].posture(expected);
        if prev.opposite().ok() != Some(cur) {
            return Err(ChainViolation::NoAlternation { step: k });
        }
    }
    Ok(())
}

/// An ordered, non-empty sequence of steps executed as one action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainedAction {
    steps: Vec<ActionStep>,
    chain_arm: Option<BodyPart>,
}

impl ChainedAction {
    pub fn single(step: ActionStep) -> Self {
        ChainedAction {
            steps: alloc::vec![step],
            chain_arm: None,
        }
    }

    /// Builds a chain, checking the chaining rules. `chain_arm` may be `None`
    /// for a multi-step chain, in which case it is derived from step 1.
    pub fn new(steps: Vec<ActionStep>, chain_arm: Option<BodyPart>) -> Result<Self, Error> {
        let arm = match (steps.len(), chain_arm) {
            (0 | 1, arm) => arm,
            (_, Some(arm)) => Some(arm),
            (_, None) => steps[0].first_moving_arm(),
        };
        validate_chain(&steps, arm, None).map_err(Error::InvalidChain)?;
        Ok(ChainedAction {
            steps,
            chain_arm: arm,
        })
    }

    /// Constructor for callers that already upheld the invariants.
    pub(crate) fn from_parts_unchecked(steps: Vec<ActionStep>, chain_arm: Option<BodyPart>) -> Self {
        debug_assert!(validate_chain(&steps, chain_arm, None).is_ok());
        ChainedAction { steps, chain_arm }
    }

    pub fn still() -> Self {
        Self::single(ActionStep::STILL)
    }

    pub fn steps(&self) -> &[ActionStep] {
        &self.steps
    }

    pub fn first(&self) -> &ActionStep {
        &self.steps[0]
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chain_arm(&self) -> Option<BodyPart> {
        self.chain_arm
    }

    pub fn validate(&self, max_len: Option<usize>) -> Result<(), ChainViolation> {
        validate_chain(&self.steps, self.chain_arm, max_len)
    }
}

/// Chained fitness: the first step's fitness plus one per additional step.
pub fn chain_fitness(action: &ChainedAction, params: &FitnessParams) -> Result<f64, Error> {
    action.validate(None).map_err(Error::InvalidChain)?;
    Ok(chain_fitness_unchecked(action, params))
}

pub(crate) fn chain_fitness_unchecked(action: &ChainedAction, params: &FitnessParams) -> f64 {
    step_fitness(action.first(), params) + (action.len() - 1) as f64
}

/// Exhaustive evaluation of every step.
#[derive(Debug, Clone)]
pub struct OracleTable {
    pub max_fitness: f64,
    pub optima: usize,
    /// One row per step, in [`ActionStep::index`] order.
    pub rows: Vec<(ActionStep, f64)>,
}

impl OracleTable {
    pub fn argmax(&self) -> impl Iterator<Item = &ActionStep> {
        self.rows
            .iter()
            .filter(|(_, f)| *f == self.max_fitness)
            .map(|(s, _)| s)
    }
}

pub fn oracle_enumerate(params: &FitnessParams) -> OracleTable {
    let rows: Vec<(ActionStep, f64)> = ActionStep::all()
        .map(|s| (s, step_fitness(&s, params)))
        .collect();
    let max_fitness = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let optima = rows.iter().filter(|r| r.1 == max_fitness).count();
    OracleTable {
        max_fitness,
        optima,
        rows,
    }
}
