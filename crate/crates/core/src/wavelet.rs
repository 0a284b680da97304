//! Orthonormal wavelet filter banks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.482_962_913_144_534_14,
    0.836_516_303_737_807_91,
    0.224_143_868_042_013_38,
    -0.129_409_522_551_260_38,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_65,
    0.630_880_767_929_858_91,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

const DB8: [f64; 16] = [
    0.054_415_842_243_104_01,
    0.312_871_590_914_299_97,
    0.675_630_736_297_289_81,
    0.585_354_683_654_206_71,
    -0.015_829_105_256_349_306,
    -0.284_015_542_961_546_93,
    0.000_472_484_573_913_282_77,
    0.128_747_426_620_478_46,
    -0.017_369_301_001_807_546,
    -0.044_088_253_930_794_752,
    0.013_981_027_917_398_282,
    0.008_746_094_047_405_776_7,
    -0.004_870_352_993_451_574_3,
    -0.000_391_740_373_376_947_05,
    0.000_675_449_406_450_569_37,
    -0.000_117_476_784_124_769_53,
];

const SYM4: [f64; 8] = [
    -0.075_765_714_789_502_213,
    -0.029_635_527_646_002_492,
    0.497_618_667_632_774_99,
    0.803_738_751_805_132_08,
    0.297_857_795_605_306_05,
    -0.099_219_543_576_633_533,
    -0.012_603_967_262_031_304,
    0.032_223_100_604_051_468,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    Db2,
    #[default]
    Db4,
    Db8,
    Sym4,
}

impl Wavelet {
    pub const ALL: [Wavelet; 5] = [
        Wavelet::Haar,
        Wavelet::Db2,
        Wavelet::Db4,
        Wavelet::Db8,
        Wavelet::Sym4,
    ];

    /// Scaling (lowpass) filter, normalized so its taps sum to sqrt(2).
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
            Wavelet::Db8 => &DB8,
            Wavelet::Sym4 => &SYM4,
        }
    }

    /// Wavelet (highpass) filter: the alternating-sign flip of the lowpass.
    pub fn highpass(self) -> Vec<f64> {
        let lo = self.lowpass();
        let n = lo.len();
        (0..n)
            .map(|k| if k % 2 == 0 { lo[n - 1 - k] } else { -lo[n - 1 - k] })
            .collect()
    }

    /// Number of vanishing moments of the wavelet filter.
    pub fn vanishing_moments(self) -> usize {
        self.lowpass().len() / 2
    }

    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Db4 => "db4",
            Wavelet::Db8 => "db8",
            Wavelet::Sym4 => "sym4",
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "db4" => Ok(Wavelet::Db4),
            "db8" => Ok(Wavelet::Db8),
            "sym4" => Ok(Wavelet::Sym4),
            other => Err(Error::Parameter(format!(
                "unknown wavelet '{other}' (expected haar, db2, db4, db8 or sym4)"
            ))),
        }
    }
}
