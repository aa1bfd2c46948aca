def rain():
    total = 0
    count = 0
    while True:
        line = input("Give rainfall (-999 stops): ")
        if line == "-999":
            break
        try:
            value = float(line)
        except ValueError:
            continue
        if value < 0:
            continue
        total += value
        count += 1
    return total / count

if __name__ == "__main__":
    print(rain())
