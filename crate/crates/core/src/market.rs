//! Site pricing, consumer assignment and the retailers' income matrix.
//!
//! Each candidate site buys from the producer with the smallest
//! `unit_price + retailer distance`; its price is that base cost times
//! `1 + markup`. A consumer buys its whole demand at the placed site that
//! minimizes `price + consumer distance`.

use itertools::Itertools;
use thiserror::Error;

use crate::apsp::CostMatrix;
use crate::exactmath::Rational;
use crate::model::{Instance, NodeId, Situation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("retailer_count {retailers} exceeds the {sites} candidate sites")]
    TooManyRetailers { retailers: usize, sites: usize },
    #[error("unpriceable site {0}: unreachable from every producer")]
    UnpriceableSite(NodeId),
    #[error("{table} table is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    DimensionMismatch { table: &'static str, rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("site {0} is not a candidate site")]
    UnknownSite(NodeId),
}

/// What a retailer's payoff counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PayoffMode {
    /// Price times units sold.
    #[default]
    Revenue,
    /// Units sold.
    Units,
}

/// Resolution of equal `price + distance` totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConsumerTiePolicy {
    /// Lower price, then lower site node id.
    #[default]
    LowerPrice,
    /// Lower site node id.
    LowerSiteId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MarketOptions {
    pub payoff: PayoffMode,
    pub consumer_tie: ConsumerTiePolicy,
}

/// How a producer-to-site table is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostConvention {
    /// Entries are `unit_price + distance`.
    #[default]
    LPlusD,
    /// Entries are the bare distance.
    D,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SitePrice {
    pub site: NodeId,
    /// Index into the instance's producer list.
    pub producer: usize,
    pub base_cost: i64,
    pub price: Rational,
}

/// Site-level inputs to pricing and choice, indexed by position in the
/// instance's producer, consumer and candidate-site lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteCosts {
    /// `unit_price + retailer distance`, producers × sites.
    pub producer_base: Vec<Vec<Option<i64>>>,
    /// Consumer distance, consumers × sites.
    pub consumer_dist: Vec<Vec<Option<i64>>>,
}

impl SiteCosts {
    pub fn from_matrices(instance: &Instance, retailer: &CostMatrix, consumer: &CostMatrix) -> Self {
        let sites = instance.candidate_sites();
        let producer_base = instance
            .producers()
            .iter()
            .map(|p| sites.iter().map(|&s| retailer.get(p.node, s).map(|d| d + p.unit_price as i64)).collect())
            .collect();
        let consumer_dist =
            instance.consumers().iter().map(|c| sites.iter().map(|&s| consumer.get(c.node, s)).collect()).collect();
        SiteCosts { producer_base, consumer_dist }
    }

    /// Builds from externally supplied tables (e.g. printed reference tables).
    pub fn from_tables(
        instance: &Instance,
        producer_site: Vec<Vec<Option<i64>>>,
        convention: CostConvention,
        consumer_dist: Vec<Vec<Option<i64>>>,
    ) -> Result<Self, MarketError> {
        let cols = instance.candidate_sites().len();
        check_dims("producer-site", &producer_site, instance.producers().len(), cols)?;
        check_dims("consumer-site", &consumer_dist, instance.consumers().len(), cols)?;
        let producer_base = producer_site
            .into_iter()
            .zip(instance.producers())
            .map(|(row, p)| {
                row.into_iter()
                    .map(|v| match convention {
                        CostConvention::LPlusD => v,
                        CostConvention::D => v.map(|d| d + p.unit_price as i64),
                    })
                    .collect()
            })
            .collect();
        Ok(SiteCosts { producer_base, consumer_dist })
    }

    /// Producer-to-site table in the requested display convention.
    pub fn producer_table(&self, instance: &Instance, convention: CostConvention) -> Vec<Vec<Option<i64>>> {
        self.producer_base
            .iter()
            .zip(instance.producers())
            .map(|(row, p)| {
                row.iter()
                    .map(|v| match convention {
                        CostConvention::LPlusD => *v,
                        CostConvention::D => v.map(|b| b - p.unit_price as i64),
                    })
                    .collect()
            })
            .collect()
    }

    /// `(1 + markup) × base` for every producer and site.
    pub fn price_table(&self, markup: &Rational) -> Vec<Vec<Option<Rational>>> {
        let factor = Rational::one() + markup;
        self.producer_base
            .iter()
            .map(|row| row.iter().map(|b| b.map(|b| &factor * &Rational::from(b))).collect())
            .collect()
    }
}

fn check_dims(table: &'static str, values: &[Vec<Option<i64>>], rows: usize, cols: usize) -> Result<(), MarketError> {
    let bad_row = values.iter().find(|r| r.len() != cols);
    if values.len() != rows || bad_row.is_some() {
        return Err(MarketError::DimensionMismatch {
            table,
            rows,
            cols,
            got_rows: values.len(),
            got_cols: bad_row.map_or(cols, |r| r.len()),
        });
    }
    Ok(())
}

/// All `retailer_count`-subsets of the candidate sites, in lexicographic order
/// of list positions. Retailer `j` takes the `j`-th site of each subset.
pub fn enumerate_situations(candidate_sites: &[NodeId], retailer_count: usize) -> Result<Vec<Situation>, MarketError> {
    if retailer_count > candidate_sites.len() {
        return Err(MarketError::TooManyRetailers { retailers: retailer_count, sites: candidate_sites.len() });
    }
    Ok(candidate_sites.iter().copied().combinations(retailer_count).map(|sites| Situation { sites }).collect())
}

fn price_from_base(site: NodeId, bases: &[Option<i64>], markup: &Rational) -> Result<SitePrice, MarketError> {
    // min_by_key keeps the first minimum, so ties go to the lowest producer index.
    let (producer, base_cost) = bases
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.map(|b| (i, b)))
        .min_by_key(|&(_, b)| b)
        .ok_or(MarketError::UnpriceableSite(site))?;
    let price = (Rational::one() + markup) * Rational::from(base_cost);
    Ok(SitePrice { site, producer, base_cost, price })
}

pub fn site_price(instance: &Instance, site: NodeId, retailer: &CostMatrix) -> Result<SitePrice, MarketError> {
    let bases: Vec<Option<i64>> =
        instance.producers().iter().map(|p| retailer.get(p.node, site).map(|d| d + p.unit_price as i64)).collect();
    price_from_base(site, &bases, instance.markup_rate())
}

/// Prices for every candidate site, in candidate-list order.
pub fn site_prices(instance: &Instance, costs: &SiteCosts) -> Result<Vec<SitePrice>, MarketError> {
    instance
        .candidate_sites()
        .iter()
        .enumerate()
        .map(|(k, &site)| {
            let bases: Vec<Option<i64>> = costs.producer_base.iter().map(|row| row[k]).collect();
            price_from_base(site, &bases, instance.markup_rate())
        })
        .collect()
}

/// Picks the retailer a consumer buys from. `distances[i]` is the consumer's
/// distance to `placed[i]`'s site. `None` if no placed site is reachable.
pub fn consumer_choice(
    placed: &[(usize, &SitePrice)],
    distances: &[Option<i64>],
    tie: ConsumerTiePolicy,
) -> Option<usize> {
    placed
        .iter()
        .zip(distances)
        .filter_map(|(&(retailer, sp), d)| d.map(|d| (retailer, sp, &sp.price + &Rational::from(d))))
        .min_by(|a, b| {
            let primary = a.2.cmp(&b.2);
            match tie {
                ConsumerTiePolicy::LowerPrice => {
                    primary.then_with(|| a.1.price.cmp(&b.1.price)).then_with(|| a.1.site.cmp(&b.1.site))
                }
                ConsumerTiePolicy::LowerSiteId => primary.then_with(|| a.1.site.cmp(&b.1.site)),
            }
        })
        .map(|(retailer, _, _)| retailer)
}

/// A consumer left without a reachable site in some situation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unserved {
    pub situation: usize,
    pub consumer: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncomeMatrix {
    pub situations: Vec<Situation>,
    /// `incomes[s][j]`: retailer `j`'s payoff in situation `s`.
    pub incomes: Vec<Vec<Rational>>,
    /// Per candidate site, in candidate-list order.
    pub site_prices: Vec<SitePrice>,
    pub unserved: Vec<Unserved>,
}

pub fn income_matrix_from_costs(
    instance: &Instance,
    costs: &SiteCosts,
    options: MarketOptions,
) -> Result<IncomeMatrix, MarketError> {
    let sites = instance.candidate_sites();
    let prices = site_prices(instance, costs)?;
    let situations = enumerate_situations(sites, instance.retailer_count())?;
    let position = |site: NodeId| sites.iter().position(|&s| s == site).ok_or(MarketError::UnknownSite(site));

    let mut incomes = Vec::with_capacity(situations.len());
    let mut unserved = Vec::new();
    for (s, situation) in situations.iter().enumerate() {
        let cols: Vec<usize> = situation.sites.iter().map(|&site| position(site)).collect::<Result<_, _>>()?;
        let placed: Vec<(usize, &SitePrice)> = cols.iter().enumerate().map(|(j, &k)| (j, &prices[k])).collect();
        let mut row = vec![Rational::zero(); situation.sites.len()];
        for (consumer, dist_row) in instance.consumers().iter().zip(&costs.consumer_dist) {
            let distances: Vec<Option<i64>> = cols.iter().map(|&k| dist_row[k]).collect();
            match consumer_choice(&placed, &distances, options.consumer_tie) {
                Some(j) => {
                    let units = Rational::from(consumer.demand);
                    row[j] += match options.payoff {
                        PayoffMode::Revenue => &units * &placed[j].1.price,
                        PayoffMode::Units => units,
                    };
                }
                None => unserved.push(Unserved { situation: s, consumer: consumer.node }),
            }
        }
        incomes.push(row);
    }
    Ok(IncomeMatrix { situations, incomes, site_prices: prices, unserved })
}

pub fn income_matrix(
    instance: &Instance,
    retailer: &CostMatrix,
    consumer: &CostMatrix,
    options: MarketOptions,
) -> Result<IncomeMatrix, MarketError> {
    income_matrix_from_costs(instance, &SiteCosts::from_matrices(instance, retailer, consumer), options)
}
