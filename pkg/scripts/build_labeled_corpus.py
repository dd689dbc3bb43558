#!/usr/bin/env python3
"""Regenerate the hand-labeled snippet corpus and the kill-test family.

Gold labels are authored by hand, by the semantics "the attribute's value can
change the returned prediction" (deliberately including one dead-code case
where the conservative static analysis is expected to be wrong). The JSONL
files are the committed artifacts; this script exists so they can be
re-emitted consistently.
"""

import json
import sys
from pathlib import Path
from textwrap import dedent

ROOT = Path(__file__).resolve().parent.parent
OUT_LABELED = ROOT / "fixtures" / "labeled_snippets.jsonl"
OUT_KILL = ROOT / "fixtures" / "kill_snippets.jsonl"

COMPAS = ["race", "sex", "age", "priors_count", "juv_fel_count", "c_charge_degree",
          "length_of_stay", "id_number", "favorite_color", "favorite_prime_number"]
INCOME = ["race", "sex", "age", "education", "occupation", "hours_per_week",
          "capital_gain", "id_number", "favorite_color", "favorite_prime_number"]
CRIME = ["race", "foreigners", "population", "medincome", "pctunemployed",
         "pctpopunderpov", "agepct12t21", "id_number", "favorite_color",
         "favorite_prime_number"]
INSUR = ["sex", "age", "region", "bmi", "smoker", "children", "id_number",
         "favorite_color", "favorite_prime_number"]
LAW = ["race", "sex", "age", "lsat", "undergrad_gpa", "family_income", "id_number",
       "favorite_color", "favorite_prime_number"]

TARGETS = {"compas": "two_year_recid", "income": "income_level",
           "crime": "violent_crime_rate", "insurance": "insurance_charges",
           "law": "bar_passage"}
SCHEMAS = {"compas": COMPAS, "income": INCOME, "crime": CRIME, "insurance": INSUR,
           "law": LAW}

ENTRIES: list[dict] = []


def snippet(ref, dataset, code_type, gold, code, executable=True, note=None):
    ENTRIES.append({
        "ref": ref,
        "dataset": dataset,
        "code_type": code_type,
        "schema": SCHEMAS[dataset],
        "prediction_target": TARGETS[dataset],
        "gold_influencing": sorted(gold),
        "executable": executable,
        "note": note,
        "code": dedent(code).strip() + "\n",
    })


# --------------------------------------------------------------------------
# conditional-statement snippets
# --------------------------------------------------------------------------

snippet("c01_params_two_branches", "compas", "conditional",
        ["age", "priors_count"], """
    def predict_two_year_recid(age, priors_count):
        score = 0
        if age < 45:
            score += 2
        if priors_count > 50:
            score += 3
        return 1 if score >= 2 else 0
    """)

snippet("c02_rowdict_sensitive_branch", "compas", "conditional",
        ["race", "age", "priors_count"], """
    def predict_recidivism(row):
        risk = 0
        if row['race'] > 50:
            risk += 2
        if row['age'] < 30:
            risk += 1
        if row['priors_count'] > 40:
            risk += 2
        return 1 if risk >= 3 else 0
    """)

snippet("c03_unused_param", "income", "conditional",
        ["age", "education"], """
    def predict_income_level(age, education, race):
        base = age * 0.5 + education * 0.5
        return 1 if base > 50 else 0
    """)

snippet("c04_comment_mention_only", "law", "conditional",
        ["lsat", "undergrad_gpa"], """
    def predict_bar_passage(row):
        # race and sex are available but intentionally not used
        total = row['lsat'] * 0.6 + row['undergrad_gpa'] * 0.4
        return 1 if total > 50 else 0
    """)

snippet("c05_ternary_return", "insurance", "conditional",
        ["bmi", "smoker"], """
    def predict_insurance_charges(row):
        base = row['bmi'] * 12
        return base * 2 if row['smoker'] > 50 else base
    """)

snippet("c06_nested_ifs", "compas", "conditional",
        ["age", "priors_count"], """
    def predict_two_year_recid(row):
        if row['priors_count'] > 50:
            if row['age'] < 35:
                return 1
            return 0
        return 0
    """)

snippet("c07_string_compares", "income", "conditional",
        ["hours_per_week", "occupation", "sex"], """
    def predict_income_level(row):
        score = row['hours_per_week'] * 0.5
        if row['sex'] == 'Male':
            score += 8
        if row['occupation'] == 'Exec-managerial':
            score += 6
        return 1 if score > 25 else 0
    """, executable=False,
        note="string equality never fires on the numeric probe dataset")

snippet("c08_weights_dict_items", "law", "conditional",
        ["lsat", "undergrad_gpa", "family_income"], """
    def predict_bar_passage(row):
        weights = {'lsat': 0.5, 'undergrad_gpa': 0.3, 'family_income': 0.2}
        total = 0.0
        for name, weight in weights.items():
            total += row[name] * weight
        return 1 if total > 50 else 0
    """)

snippet("c09_early_return_guard", "insurance", "conditional",
        ["age", "bmi", "smoker"], """
    def predict_insurance_charges(row):
        if row['age'] < 18:
            return 1000.0
        charge = 2000.0 + row['bmi'] * 40
        if row['smoker'] > 50:
            charge *= 1.8
        return charge
    """)

snippet("c10_branch_not_on_return_path", "compas", "conditional",
        ["priors_count", "juv_fel_count"], """
    def predict_two_year_recid(row):
        label = 'standard'
        if row['race'] > 60:
            label = 'review'
        risk = row['priors_count'] * 0.6 + row['juv_fel_count'] * 0.4
        return 1 if risk > 50 else 0
    """)

snippet("c11_loop_over_columns", "crime", "conditional",
        ["pctunemployed", "pctpopunderpov"], """
    def predict_violent_crime_rate(row):
        total = 0.0
        for col in ['pctunemployed', 'pctpopunderpov']:
            total += row[col]
        return total / 2
    """)

snippet("c12_helper_call", "compas", "conditional",
        ["priors_count"], """
    def high_priors(count):
        return count > 50

    def predict_two_year_recid(row):
        if high_priors(row['priors_count']):
            return 1
        return 0
    """)

snippet("c13_pure_arithmetic", "law", "conditional",
        ["lsat", "undergrad_gpa"], """
    def predict_bar_passage(lsat, undergrad_gpa):
        return 0.02 * lsat + 0.2 * undergrad_gpa
    """)

snippet("c14_while_loop", "income", "conditional",
        ["capital_gain", "education"], """
    def predict_income_level(row):
        level = 0
        remaining = row['capital_gain']
        while remaining > 10:
            level += 1
            remaining /= 2
        return 1 if level > 2 and row['education'] > 60 else 0
    """)

snippet("c15_row_get", "compas", "conditional",
        ["priors_count", "race"], """
    def predict_two_year_recid(row):
        risk = row.get('priors_count', 0) * 0.5
        if row.get('race', 0) > 55:
            risk += 30
        return 1 if risk > 40 else 0
    """)

snippet("c16_shadow_kill", "insurance", "conditional",
        ["bmi"], """
    def predict_insurance_charges(row):
        factor = row['region']
        factor = 1.0
        return row['bmi'] * 30 * factor
    """)

snippet("c17_both_arms_return", "crime", "conditional",
        ["pctpopunderpov", "foreigners"], """
    def predict_violent_crime_rate(row):
        if row['pctpopunderpov'] > 40:
            return 80.0 + row['foreigners'] * 0.1
        else:
            return 20.0
    """)

snippet("c18_many_branches", "income", "conditional",
        ["education", "hours_per_week", "age", "race", "sex"], """
    def predict_income_level(age, education, occupation, hours_per_week, race, sex):
        score = 0
        if education > 55:
            score += 3
        if hours_per_week > 45:
            score += 2
        if age > 35:
            score += 1
        if race > 50:
            score += 2
        if sex > 50:
            score += 1
        return 1 if score >= 4 else 0
    """)

snippet("c19_docstring_mention", "law", "conditional",
        ["lsat"], """
    def predict_bar_passage(row):
        \"\"\"Score bar exam passage without using race or sex information.\"\"\"
        return 1 if row['lsat'] > 50 else 0
    """)

snippet("c20_boolean_flag", "compas", "conditional",
        ["age", "priors_count"], """
    def predict_two_year_recid(row):
        flag = row['age'] < 50 and row['priors_count'] > 50
        return 1 if flag else 0
    """)

snippet("c21_dead_branch", "income", "conditional",
        ["education"], """
    def predict_income_level(row):
        score = row['education'] * 0.4
        if False:
            score += row['race']
        return 1 if score > 20 else 0
    """, note="static analysis is expected to over-approximate the dead branch")

snippet("c22_irrelevant_used", "crime", "conditional",
        ["pctunemployed", "favorite_color"], """
    def predict_violent_crime_rate(row):
        level = row['pctunemployed'] * 1.5
        if row['favorite_color'] > 50:
            level += 5
        return level
    """)

snippet("c23_del_kill", "compas", "conditional",
        ["priors_count"], """
    def predict_two_year_recid(row):
        d = dict(row)
        del d['race']
        risk = d.get('race', 0) * 2 + d.get('priors_count', 0)
        return 1 if risk > 50 else 0
    """)

snippet("c24_two_entry_functions", "income", "conditional",
        ["sex", "education"], """
    def score_by_demographics(row):
        return row['sex'] * 0.1

    def predict_income_level(row):
        return 1 if row['education'] > 50 else 0
    """, executable=False,
        note="two uncalled entry candidates; the report unions both")

snippet("c25_boolean_and_branch", "insurance", "conditional",
        ["sex", "age", "children"], """
    def predict_insurance_charges(row):
        if row['sex'] > 50 and row['age'] > 40:
            return 9000.0
        return 4000.0 + row['children'] * 150
    """)

snippet("c26_chained_compare", "law", "conditional",
        ["lsat"], """
    def predict_bar_passage(row):
        if 40 < row['lsat'] < 90:
            return 1
        return 0
    """)

snippet("c27_max_arithmetic", "compas", "conditional",
        ["priors_count", "juv_fel_count"], """
    def predict_two_year_recid(row):
        risk = max(row['priors_count'] * 0.8, row['juv_fel_count'] * 0.9)
        return 1 if risk > 55 else 0
    """)

snippet("c28_elif_ladder", "crime", "conditional",
        ["medincome", "pctunemployed", "race"], """
    def predict_violent_crime_rate(row):
        if row['medincome'] > 70:
            rate = 10.0
        elif row['pctunemployed'] > 50:
            rate = 60.0
        else:
            rate = 30.0
        if row['race'] > 65:
            rate += 15.0
        return rate
    """)

snippet("c29_prose_string", "law", "conditional",
        ["undergrad_gpa"], """
    def predict_bar_passage(row):
        note = "demographic attributes such as race were excluded"
        result = row['undergrad_gpa'] * 0.12
        return result
    """)

snippet("c30_intermediate_vars", "crime", "conditional",
        ["medincome", "pctpopunderpov"], """
    def predict_violent_crime_rate(row):
        wealth = row['medincome'] / 100.0
        poverty = row['pctpopunderpov'] / 100.0
        return 50.0 - wealth * 20 + poverty * 30
    """)

snippet("c31_return_dict", "income", "conditional",
        ["capital_gain", "hours_per_week"], """
    def predict_income_level(row):
        score = row['capital_gain'] * 0.001 + row['hours_per_week'] * 0.3
        return {'prediction': 1 if score > 15 else 0, 'score': score}
    """)

snippet("c32_min_abs", "insurance", "conditional",
        ["bmi", "age"], """
    def predict_insurance_charges(row):
        base = min(row['bmi'] * 50, 3000)
        penalty = abs(row['age'] - 40) * 10
        return base + penalty
    """)

# --------------------------------------------------------------------------
# ml-pipeline snippets
# --------------------------------------------------------------------------

snippet("p01_script_feature_list", "crime", "ml_pipeline",
        ["pctunemployed", "medincome", "race", "foreigners", "population"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestClassifier
    from sklearn.model_selection import train_test_split

    df = pd.read_csv('communities_crime.csv')
    features = df[['pctunemployed', 'medincome', 'race', 'foreigners', 'population']]
    target = df['violent_crime_rate']
    X_train, X_test, y_train, y_test = train_test_split(
        features, target, test_size=0.25, random_state=42)
    clf = RandomForestClassifier(n_estimators=20, random_state=42)
    clf.fit(X_train, y_train)
    """)

snippet("p02_drop_kill", "income", "ml_pipeline",
        ["age", "education", "capital_gain"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('adult.csv')
    features = df[['age', 'education', 'sex', 'capital_gain']]
    features = features.drop(columns=['sex'])
    model = LogisticRegression(max_iter=200)
    model.fit(features, df['income_level'])
    """)

snippet("p03_drop_target_keeps_all", "insurance", "ml_pipeline",
        [a for a in INSUR], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('insurance.csv')
    X = df.drop(columns=['insurance_charges'])
    y = df['insurance_charges']
    model = RandomForestRegressor(n_estimators=10, random_state=0)
    model.fit(X, y)
    """, executable=False,
        note="perturbation may miss weak features when all columns are used")

snippet("p04_feature_var", "compas", "ml_pipeline",
        ["age", "priors_count", "juv_fel_count", "race"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestClassifier

    df = pd.read_csv('compas.csv')
    feature_cols = ['age', 'priors_count', 'juv_fel_count', 'race']
    X = df[feature_cols]
    y = df['two_year_recid']
    clf = RandomForestClassifier(n_estimators=15, random_state=1)
    clf.fit(X, y)
    """)

snippet("p05_list_append", "law", "ml_pipeline",
        ["lsat", "undergrad_gpa", "race"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('law.csv')
    cols = ['lsat', 'undergrad_gpa']
    cols.append('race')
    model = LogisticRegression(max_iter=300)
    model.fit(df[cols], df['bar_passage'])
    """)

snippet("p06_list_remove_kill", "income", "ml_pipeline",
        ["age", "education", "hours_per_week"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('adult.csv')
    cols = ['age', 'education', 'race', 'hours_per_week']
    cols.remove('race')
    model = LogisticRegression(max_iter=300)
    model.fit(df[cols], df['income_level'])
    """)

snippet("p07_scaler_chain", "insurance", "ml_pipeline",
        ["age", "bmi", "smoker"], """
    import pandas as pd
    from sklearn.preprocessing import StandardScaler
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('insurance.csv')
    X = df[['age', 'bmi', 'smoker']]
    y = df['insurance_charges']
    scaler = StandardScaler()
    X_scaled = scaler.fit_transform(X)
    model = LogisticRegression(max_iter=200)
    model.fit(X_scaled, y)
    predictions = model.predict_proba(X_scaled)
    """)

snippet("p08_mlp_split", "crime", "ml_pipeline",
        ["population", "medincome", "race"], """
    import pandas as pd
    from sklearn.neural_network import MLPRegressor
    from sklearn.model_selection import train_test_split

    df = pd.read_csv('crime.csv')
    X = df[['population', 'medincome', 'race']]
    y = df['violent_crime_rate']
    X_train, X_test, y_train, y_test = train_test_split(
        X, y, test_size=0.25, random_state=7)
    model = MLPRegressor(hidden_layer_sizes=(16,), max_iter=200, random_state=7)
    model.fit(X_train, y_train)
    predictions = model.predict(X_test)
    """)

snippet("p09_helper_select", "compas", "ml_pipeline",
        ["priors_count", "age", "c_charge_degree"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestClassifier

    def select_features(frame):
        return frame[['priors_count', 'age', 'c_charge_degree']]

    df = pd.read_csv('compas.csv')
    X = select_features(df)
    y = df['two_year_recid']
    clf = RandomForestClassifier(n_estimators=15, random_state=3)
    clf.fit(X, y)
    """)

snippet("p10_dataframe_from_dict", "law", "ml_pipeline",
        ["lsat", "undergrad_gpa"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('law.csv')
    data = pd.DataFrame({'lsat': df['lsat'], 'gpa': df['undergrad_gpa']})
    model = LinearRegression()
    model.fit(data, df['bar_passage'])
    """)

snippet("p11_derived_column", "income", "ml_pipeline",
        ["capital_gain", "hours_per_week", "education"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('adult.csv')
    df['gain_per_hour'] = df['capital_gain'] / (df['hours_per_week'] + 1)
    X = df[['gain_per_hour', 'education']]
    model = RandomForestRegressor(n_estimators=10, random_state=5)
    model.fit(X, df['income_level'])
    """)

snippet("p12_overwrite_kill", "crime", "ml_pipeline",
        ["pctunemployed"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('crime.csv')
    df['race'] = 0.0
    X = df[['race', 'pctunemployed']]
    model = RandomForestRegressor(n_estimators=10, random_state=2)
    model.fit(X, df['violent_crime_rate'])
    """)

snippet("p13_filtered_columns", "insurance", "ml_pipeline",
        ["age", "bmi", "smoker", "children", "id_number", "favorite_color",
         "favorite_prime_number"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('insurance.csv')
    cols = [c for c in df.columns
            if c != 'insurance_charges' and c not in ('sex', 'region')]
    X = df[cols]
    model = RandomForestRegressor(n_estimators=10, random_state=4)
    model.fit(X, df['insurance_charges'])
    """)

snippet("p14_loc_selection", "compas", "ml_pipeline",
        ["age", "priors_count", "race"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('compas.csv')
    X = df.loc[:, ['age', 'priors_count', 'race']]
    y = df['two_year_recid']
    model = LogisticRegression(max_iter=250)
    model.fit(X, y)
    """)

snippet("p15_cross_val_score", "law", "ml_pipeline",
        ["lsat", "undergrad_gpa", "race"], """
    import pandas as pd
    from sklearn.model_selection import cross_val_score
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('law.csv')
    X = df[['lsat', 'undergrad_gpa', 'race']]
    y = df['bar_passage']
    model = LinearRegression()
    scores = cross_val_score(model, X, y, cv=3)
    """)

snippet("p16_fit_predict_inline", "insurance", "ml_pipeline",
        ["bmi", "age"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('insurance.csv')
    model = RandomForestRegressor(n_estimators=10, random_state=6)
    model.fit(df[['bmi', 'age']], df['insurance_charges'])
    predictions = model.predict(df[['bmi', 'age']])
    """)

snippet("p17_ingestion_only", "crime", "ml_pipeline",
        ["population", "pctpopunderpov", "foreigners"], """
    import pandas as pd

    def load_data(path):
        df = pd.read_csv(path)
        features = df[['population', 'pctpopunderpov', 'foreigners']]
        target = df['violent_crime_rate']
        return features, target
    """)

snippet("p18_gridsearch_complex", "income", "ml_pipeline",
        ["age", "education", "hours_per_week", "race"], """
    import pandas as pd
    from sklearn.model_selection import train_test_split, GridSearchCV
    from sklearn.preprocessing import StandardScaler
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('adult.csv')
    X = df[['age', 'education', 'hours_per_week', 'race']]
    y = df['income_level']
    X_train, X_test, y_train, y_test = train_test_split(
        X, y, test_size=0.25, random_state=8)
    scaler = StandardScaler()
    X_train_scaled = scaler.fit_transform(X_train)
    X_test_scaled = scaler.transform(X_test)
    grid = GridSearchCV(RandomForestRegressor(random_state=8),
                        {'n_estimators': [5, 10]}, cv=2)
    grid.fit(X_train_scaled, y_train)
    predictions = grid.predict(X_test_scaled)
    """)

snippet("p19_trained_but_unused_model", "law", "ml_pipeline",
        ["race", "lsat", "undergrad_gpa"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('law.csv')
    probe = LogisticRegression(max_iter=200)
    probe.fit(df[['race']], df['bar_passage'])
    model = LogisticRegression(max_iter=200)
    model.fit(df[['lsat', 'undergrad_gpa']], df['bar_passage'])
    predictions = model.predict_proba(df[['lsat', 'undergrad_gpa']])
    """, note="any fitted model is a sink, even if its predictions go unused")

snippet("p20_mask_filter", "compas", "ml_pipeline",
        ["age", "priors_count", "juv_fel_count"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestClassifier

    df = pd.read_csv('compas.csv')
    adults = df[df['age'] > 30]
    X = adults[['priors_count', 'juv_fel_count']]
    clf = RandomForestClassifier(n_estimators=15, random_state=9)
    clf.fit(X, adults['two_year_recid'])
    """)

snippet("p21_no_sensitive", "insurance", "ml_pipeline",
        ["bmi", "children", "smoker"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('insurance.csv')
    X = df[['bmi', 'children', 'smoker']]
    model = LinearRegression()
    model.fit(X, df['insurance_charges'])
    predictions = model.predict(X)
    """)

snippet("p22_irrelevant_feature", "law", "ml_pipeline",
        ["lsat", "favorite_color"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('law.csv')
    model = LinearRegression()
    model.fit(df[['lsat', 'favorite_color']], df['bar_passage'])
    predictions = model.predict(df[['lsat', 'favorite_color']])
    """)

snippet("p23_target_var", "compas", "ml_pipeline",
        ["priors_count"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('compas.csv')
    y = df['two_year_recid']
    X = df[['priors_count']]
    model = LogisticRegression(max_iter=150)
    model.fit(X, y)
    predictions = model.predict_proba(X)
    """)

snippet("p24_values_array", "crime", "ml_pipeline",
        ["medincome", "pctunemployed"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('crime.csv')
    X = df[['medincome', 'pctunemployed']].values
    y = df['violent_crime_rate'].values
    model = LinearRegression()
    model.fit(X, y)
    predictions = model.predict(X)
    """)

snippet("p25_sample_weight", "income", "ml_pipeline",
        ["education", "hours_per_week", "age"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('adult.csv')
    X = df[['education', 'hours_per_week']]
    model = LinearRegression()
    model.fit(X, df['income_level'], sample_weight=df['age'])
    predictions = model.predict(X)
    """)

snippet("p26_script_print", "crime", "ml_pipeline",
        ["pctpopunderpov", "race"], """
    import pandas as pd
    from sklearn.tree import DecisionTreeRegressor

    df = pd.read_csv('crime.csv')
    X = df[['pctpopunderpov', 'race']]
    y = df['violent_crime_rate']
    model = DecisionTreeRegressor(max_depth=4, random_state=11)
    model.fit(X, y)
    predictions = model.predict(X)
    print(predictions)
    """)

snippet("p27_get_dummies", "income", "ml_pipeline",
        ["occupation", "education", "sex"], """
    import pandas as pd
    from sklearn.linear_model import LogisticRegression

    df = pd.read_csv('adult.csv')
    X = pd.get_dummies(df[['occupation', 'education', 'sex']])
    model = LogisticRegression(max_iter=200)
    model.fit(X, df['income_level'])
    """)

snippet("p28_svc", "compas", "ml_pipeline",
        ["age", "priors_count", "race"], """
    import pandas as pd
    from sklearn.svm import SVC

    df = pd.read_csv('compas.csv')
    X = df[['age', 'priors_count', 'race']]
    y = df['two_year_recid']
    model = SVC(kernel='rbf', random_state=12)
    model.fit(X, y)
    """)

snippet("p29_chained_fit", "insurance", "ml_pipeline",
        ["smoker", "bmi", "age"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestRegressor

    df = pd.read_csv('insurance.csv')
    model = RandomForestRegressor(n_estimators=10, random_state=13).fit(
        df[['smoker', 'bmi', 'age']], df['insurance_charges'])
    predictions = model.predict(df[['smoker', 'bmi', 'age']])
    """)

snippet("p30_filter_items", "law", "ml_pipeline",
        ["lsat", "family_income"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('law.csv')
    X = df.filter(items=['lsat', 'family_income'])
    model = LinearRegression()
    model.fit(X, df['bar_passage'])
    predictions = model.predict(X)
    """)

snippet("p31_branch_feature_sets", "crime", "ml_pipeline",
        ["population", "medincome", "race"], """
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('crime.csv')
    if len(df) > 100:
        X = df[['population', 'medincome', 'race']]
    else:
        X = df[['population', 'medincome']]
    model = LinearRegression()
    model.fit(X, df['violent_crime_rate'])
    """, executable=False,
        note="only one arm executes on the 32-row probe; the report unions both")

snippet("p32_numpy_stack", "insurance", "ml_pipeline",
        ["bmi", "children"], """
    import numpy as np
    import pandas as pd
    from sklearn.linear_model import LinearRegression

    df = pd.read_csv('insurance.csv')
    X = np.column_stack([df['bmi'], df['children']])
    y = df['insurance_charges']
    model = LinearRegression()
    model.fit(X, y)
    predictions = model.predict(X)
    """)

snippet("p33_commented_select", "compas", "ml_pipeline",
        ["priors_count", "age", "length_of_stay"], """
    import pandas as pd
    from sklearn.ensemble import RandomForestClassifier

    df = pd.read_csv('compas.csv')
    features = df[[
        'priors_count',   # criminal history
        'age',            # demographic
        'length_of_stay',
    ]]
    clf = RandomForestClassifier(n_estimators=15, random_state=14)
    clf.fit(features, df['two_year_recid'])
    """)


# --------------------------------------------------------------------------
# kill-test family: the named attribute must never appear in the report
# --------------------------------------------------------------------------

KILLS: list[dict] = []


def kill(ref, dataset, killed, survivors, code):
    KILLS.append({
        "ref": ref,
        "schema": SCHEMAS[dataset],
        "prediction_target": TARGETS[dataset],
        "killed": sorted(killed),
        "survivors": sorted(survivors),
        "code": dedent(code).strip() + "\n",
    })


kill("k01_drop_columns_list", "income", ["sex"], ["age", "education"], """
    import pandas as pd
    df = pd.read_csv('adult.csv')
    features = df[['age', 'education', 'sex']]
    features = features.drop(columns=['sex'])
    model.fit(features, df['income_level'])
    """)

kill("k02_drop_positional_axis1", "compas", ["race"], ["priors_count"], """
    import pandas as pd
    df = pd.read_csv('compas.csv')
    X = df[['race', 'priors_count']].drop('race', axis=1)
    model.fit(X, df['two_year_recid'])
    """)

kill("k03_drop_axis_columns", "law", ["age"], ["lsat"], """
    import pandas as pd
    df = pd.read_csv('law.csv')
    X = df[['age', 'lsat']].drop(['age'], axis='columns')
    model.fit(X, df['bar_passage'])
    """)

kill("k04_list_remove", "crime", ["race"], ["population"], """
    import pandas as pd
    df = pd.read_csv('crime.csv')
    cols = ['race', 'population']
    cols.remove('race')
    model.fit(df[cols], df['violent_crime_rate'])
    """)

kill("k05_list_reassign", "insurance", ["sex"], ["bmi"], """
    import pandas as pd
    df = pd.read_csv('insurance.csv')
    cols = ['sex', 'bmi']
    cols = ['bmi']
    model.fit(df[cols], df['insurance_charges'])
    """)

kill("k06_column_overwrite", "income", ["race"], ["education"], """
    import pandas as pd
    df = pd.read_csv('adult.csv')
    df['race'] = 0
    model.fit(df[['race', 'education']], df['income_level'])
    """)

kill("k07_del_column", "compas", ["sex"], ["age"], """
    import pandas as pd
    df = pd.read_csv('compas.csv')
    X = df[['sex', 'age']]
    del X['sex']
    model.fit(X, df['two_year_recid'])
    """)

kill("k08_drop_inplace", "crime", ["foreigners"], ["medincome"], """
    import pandas as pd
    df = pd.read_csv('crime.csv')
    X = df[['foreigners', 'medincome']]
    X.drop(columns=['foreigners'], inplace=True)
    model.fit(X, df['violent_crime_rate'])
    """)

kill("k09_scalar_shadow", "law", ["race"], ["lsat"], """
    def predict_bar_passage(row):
        adjustment = row['race']
        adjustment = 0.0
        return row['lsat'] * 0.5 + adjustment
    """)

kill("k10_drop_by_variable", "insurance", ["sex"], ["age", "bmi"], """
    import pandas as pd
    df = pd.read_csv('insurance.csv')
    to_drop = ['sex']
    X = df[['sex', 'age', 'bmi']].drop(columns=to_drop)
    model.fit(X, df['insurance_charges'])
    """)


def main():
    OUT_LABELED.parent.mkdir(parents=True, exist_ok=True)
    with OUT_LABELED.open("w", encoding="utf-8") as fh:
        for entry in ENTRIES:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
    with OUT_KILL.open("w", encoding="utf-8") as fh:
        for entry in KILLS:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
    n_cond = sum(1 for e in ENTRIES if e["code_type"] == "conditional")
    n_pipe = sum(1 for e in ENTRIES if e["code_type"] == "ml_pipeline")
    n_exec = sum(1 for e in ENTRIES if e["executable"])
    print(f"labeled snippets: {len(ENTRIES)} ({n_cond} conditional, {n_pipe} pipeline, "
          f"{n_exec} executable); kill fixtures: {len(KILLS)}")


if __name__ == "__main__":
    sys.exit(main())
