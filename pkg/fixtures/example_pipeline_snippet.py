import pandas as pd
from sklearn.ensemble import RandomForestClassifier
from sklearn.model_selection import train_test_split

df = pd.read_csv("communities_crime.csv")

# Define the features
features = df[['agePct16t24', 'medIncome',
               'PctHousOwnOcc', 'PctPopUnderPov',
               'PolicPerPop', 'PctUnemployed',
               'race', 'population',
               'agePct12t21', 'foreigners']]
target = df['violent_crime_rate']

X_train, X_test, y_train, y_test = train_test_split(
    features, target, test_size=0.2, random_state=42)

clf = RandomForestClassifier(
    n_estimators=100, random_state=42)
clf.fit(X_train, y_train)
